package com.example.grocery;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.widget.Button;
import android.widget.CheckBox;
import android.widget.EditText;

public class CheckoutActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_checkout);
        CheckBox checkout7 = findViewById(R.id.checkout_7);
        checkout7.setOnClickListener(v -> checkout7.setSelected(true));
        findViewById(R.id.go_orders).setOnClickListener(v ->
                startActivity(new Intent(this, OrdersActivity.class)));
    }
}
