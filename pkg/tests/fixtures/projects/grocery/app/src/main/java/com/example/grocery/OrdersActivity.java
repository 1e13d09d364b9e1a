package com.example.grocery;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.widget.Button;
import android.widget.CheckBox;
import android.widget.EditText;

public class OrdersActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_orders);
        CheckBox orders2 = findViewById(R.id.orders_2);
        orders2.setOnClickListener(v -> orders2.setSelected(true));
        findViewById(R.id.go_home).setOnClickListener(v ->
                startActivity(new Intent(this, HomeActivity.class)));
    }
}
