package com.example.grocery;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.widget.Button;
import android.widget.CheckBox;
import android.widget.EditText;

public class ItemDetailActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_item_detail);
        CheckBox itemdetail6 = findViewById(R.id.item_detail_6);
        itemdetail6.setOnClickListener(v -> itemdetail6.setSelected(true));
        findViewById(R.id.go_cart).setOnClickListener(v ->
                startActivity(new Intent(this, CartActivity.class)));
    }
}
