#![allow(dead_code)]

use std::path::PathBuf;

pub const MODEL: &str = include_str!("../fixtures/MODEL.CP");
pub const MODPS: &str = include_str!("../fixtures/MODPS.CP");
pub const DERIV: &str = include_str!("../fixtures/DERIV.CP");
pub const CORREL: &str = include_str!("../fixtures/CORREL.txt");
pub const TEL3: &str = include_str!("../fixtures/TEL3.ofc");

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub const BOUNDARY: &str = "cpoint-test-boundary";

pub fn multipart(fields: &[(&str, &str)]) -> Vec<u8> {
    let mut body = String::new();
    for (name, value) in fields {
        body.push_str(&format!(
            "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"{name}\"; filename=\"{name}.txt\"\r\nContent-Type: text/plain\r\n\r\n{value}\r\n"
        ));
    }
    body.push_str(&format!("--{BOUNDARY}--\r\n"));
    body.into_bytes()
}
