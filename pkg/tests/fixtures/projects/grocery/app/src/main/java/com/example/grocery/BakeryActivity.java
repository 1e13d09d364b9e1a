package com.example.grocery;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.widget.Button;
import android.widget.CheckBox;
import android.widget.EditText;

public class BakeryActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_bakery);
        EditText bakery1 = (EditText) findViewById(R.id.bakery_1);
        CheckBox bakery2 = findViewById(R.id.bakery_2);
        bakery2.setOnClickListener(v -> bakery2.setSelected(true));
        Button bakery5 = findViewById(R.id.bakery_5);
        bakery5.setOnClickListener(v -> bakery5.setSelected(true));
        CheckBox bakery6 = findViewById(R.id.bakery_6);
        bakery6.setOnClickListener(v -> bakery6.setSelected(true));
        findViewById(R.id.go_item_detail).setOnClickListener(v ->
                startActivity(new Intent(this, ItemDetailActivity.class)));
    }
}
