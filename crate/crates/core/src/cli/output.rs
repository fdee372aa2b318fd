//! JSON rendering, run manifests and the structured error envelope.

use std::io;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::seed::sha256_hex;

/// Compact JSON whose floats carry 17 significant digits, enough to
/// round-trip every `f64`.
struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub wall_time_ms: f64,
    /// SHA-256 of the rendered output without the manifest.
    pub output_digest: String,
}

/// Renders `body` (an object) with its manifest attached under `"manifest"`.
pub fn with_manifest(mut body: Value, command: &str, args: &[String], seed: Option<u64>, wall_time_ms: f64) -> String {
    let digest = sha256_hex(render(&body).as_bytes());
    let manifest = RunManifest {
        command: command.to_string(),
        args: args.to_vec(),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms,
        output_digest: digest,
    };
    if let Value::Object(map) = &mut body {
        map.insert("manifest".into(), to_value(&manifest));
    }
    render(&body)
}

pub fn error_json(e: &Error) -> String {
    render(&json!({ "error": { "kind": e.kind(), "message": e.to_string() } }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0, -1e-300, 6.02214076e23] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let parsed: Value = serde_json::from_str(&render(&json!([v]))).unwrap();
            assert_eq!(parsed[0].as_f64().unwrap(), v);
        }
        assert_eq!(render(&json!({"x": 0.5, "n": 3})), r#"{"x":5.0000000000000000e-1,"n":3}"#);
        assert_eq!(render(&json!([f64::NAN])), "[null]");
    }

    #[test]
    fn manifest_digest_ignores_wall_time() {
        let body = json!({"value": "1"});
        let a: Value = serde_json::from_str(&with_manifest(body.clone(), "norm", &[], None, 1.0)).unwrap();
        let b: Value = serde_json::from_str(&with_manifest(body, "norm", &[], None, 7.0)).unwrap();
        assert_eq!(a["manifest"]["output_digest"], b["manifest"]["output_digest"]);
        assert_ne!(a["manifest"]["wall_time_ms"], b["manifest"]["wall_time_ms"]);
    }
}
