package com.example.mini;

import android.content.Context;
import android.util.AttributeSet;
import android.view.View;

public class BadgeView extends View {
    public BadgeView(Context context, AttributeSet attrs) {
        super(context, attrs);
    }
}
