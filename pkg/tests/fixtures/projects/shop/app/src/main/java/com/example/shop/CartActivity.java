package com.example.shop;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.widget.Button;
import android.widget.CheckBox;

public class CartActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_cart);
        CheckBox gift = findViewById(R.id.gift);
        gift.setOnCheckedChangeListener((button, checked) -> updateTotal(checked));
        Button checkout = findViewById(R.id.checkout);
        checkout.setOnClickListener(v -> startActivity(new Intent(this, CheckoutActivity.class)));
        // startActivity(new Intent(this, MainActivity.class));
    }

    private void updateTotal(boolean gift) {
    }
}
