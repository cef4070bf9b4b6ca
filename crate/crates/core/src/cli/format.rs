//! Output formatting: every float carries 17 significant digits so tables
//! and records parse back to the same bits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// `{:.16e}`; non-finite values print as `NaN`, `inf` or `-inf`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Precise;

impl Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with full-precision floats (non-finite values become `null`).
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    String::from_utf8(buf).expect("JSON is UTF-8")
}
