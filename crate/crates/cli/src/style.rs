use std::io::IsTerminal;
use std::sync::OnceLock;

use serde::Serialize;

/// ANSI color is used only on a terminal and only when `ACR_SCAN_COLOR` is not `0`.
fn enabled() -> bool {
    static ENABLED: OnceLock<bool> = OnceLock::new();
    *ENABLED.get_or_init(|| {
        std::env::var("ACR_SCAN_COLOR").map_or(true, |v| v != "0")
            && std::io::stdout().is_terminal()
    })
}

/// The serialized name of a unit enum variant, e.g. `YES` or `CERTIFIED`.
pub fn label<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "?".into(),
    }
}

/// A status label, colored green, red or yellow by meaning.
pub fn status<T: Serialize>(value: &T) -> String {
    let text = label(value);
    if !enabled() {
        return text;
    }
    let code = match text.as_str() {
        "YES" | "CERTIFIED" | "DIVISIBLE" | "NONDEG" | "NONDEG_WRT_S" => "32",
        "NO" | "FAILS" | "NOT_DIVISIBLE" | "DEG" | "DEG_WRT_S" | "EMPTY_CONE" => "31",
        "CONDITIONAL" | "INCONCLUSIVE" | "NON_INFORMATIVE" => "33",
        _ => return text,
    };
    format!("\x1b[{code}m{text}\x1b[0m")
}

/// Six significant digits; both signed zeros print as `0`.
pub fn number(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.6e}")
    }
}

pub fn tuple(values: impl IntoIterator<Item = String>) -> String {
    format!("({})", values.into_iter().collect::<Vec<_>>().join(", "))
}
