"""Tiny on-disk Android projects for tests."""

from __future__ import annotations

from pathlib import Path

NS = 'xmlns:android="http://schemas.android.com/apk/res/android"'


def write_android_project(root: Path, activities: dict[str, str], layouts: dict[str, str],
                          package: str = "com.ex", values: str | None = None, launcher: str | None = None) -> Path:
    """``activities`` maps simple class name -> Java onCreate body."""
    def activity(name: str) -> str:
        if name != launcher:
            return f'<activity android:name=".{name}" />'
        return (f'<activity android:name=".{name}"><intent-filter>'
                '<action android:name="android.intent.action.MAIN"/>'
                '<category android:name="android.intent.category.LAUNCHER"/></intent-filter></activity>')

    acts = "\n".join(activity(a) for a in activities)
    (root / "res/layout").mkdir(parents=True)
    (root / "AndroidManifest.xml").write_text(
        f'<manifest {NS} package="{package}"><application>{acts}</application></manifest>')
    for name, xml in layouts.items():
        (root / f"res/layout/{name}.xml").write_text(xml)
    if values is not None:
        (root / "res/values").mkdir(parents=True)
        (root / "res/values/strings.xml").write_text(values)
    src = root / "src" / package.replace(".", "/")
    src.mkdir(parents=True)
    for name, body in activities.items():
        (src / f"{name}.java").write_text(
            f"package {package};\npublic class {name} extends Activity {{\n"
            f"  void onCreate(Bundle b) {{\n{body}\n  }}\n}}\n")
    return root
