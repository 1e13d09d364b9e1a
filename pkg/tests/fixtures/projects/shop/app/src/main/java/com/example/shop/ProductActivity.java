package com.example.shop;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;
import android.widget.RatingBar;
import android.widget.TextView;

public class ProductActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_product);
        TextView name = findViewById(R.id.name);
        TextView price = findViewById(R.id.price);
        RatingBar rating = findViewById(R.id.rating);
        rating.setOnRatingBarChangeListener((bar, value, fromUser) -> name.setSelected(fromUser));
    }

    public void addToCart(View view) {
        startActivity(new Intent(this, CartActivity.class));
    }
}
