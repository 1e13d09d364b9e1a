package com.example.shop;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;
import android.widget.AdapterView;
import android.widget.EditText;
import android.widget.ListView;

public class MainActivity extends Activity {
    private EditText search;

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_main);
        search = findViewById(R.id.search);
        ListView products = (ListView) findViewById(R.id.products);
        products.setOnItemClickListener(new AdapterView.OnItemClickListener() {
            @Override
            public void onItemClick(AdapterView<?> parent, View view, int position, long id) {
                startActivity(new Intent(MainActivity.this, ProductActivity.class));
            }
        });
        findViewById(R.id.cart).setOnClickListener(v ->
                startActivity(new Intent(this, CartActivity.class)));
        findViewById(R.id.info).setOnClickListener(v -> {
            Intent intent = new Intent(MainActivity.this, StoreInfoActivity.class);
            startActivity(intent);
        });
        /* findViewById(R.id.cat_fruit) is wired up in a later version */
        search.setHint("type to search, e.g. setOnClickListener(");
    }
}
