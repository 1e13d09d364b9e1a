package com.example.grocery;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.widget.Button;
import android.widget.CheckBox;
import android.widget.EditText;

public class SearchActivity extends Activity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_search);
        Button search3 = findViewById(R.id.search_3);
        search3.setOnClickListener(v -> search3.setSelected(true));
        findViewById(R.id.go_item_detail).setOnClickListener(v ->
                startActivity(new Intent(this, ItemDetailActivity.class)));
    }
}
