//! Angles written as plain numbers or as multiples of pi: `0.9pi`, `pi/5`, `-3*pi/2`.

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer};

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase()
        .replace('π', "pi");
    let bad = || format!("not a number or multiple of pi: {text:?}");
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(pos) => {
            let coef = match s[..pos].trim_end_matches('*') {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &s[pos + 2..];
            let div = if rest.is_empty() {
                1.0
            } else {
                rest.strip_prefix('/')
                    .ok_or_else(bad)?
                    .parse::<f64>()
                    .map_err(|_| bad())?
            };
            coef * PI / div
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Raw {
    Num(f64),
    Text(String),
}

impl Raw {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            Raw::Num(x) => Ok(x),
            Raw::Text(s) => parse_angle(&s).map_err(E::custom),
        }
    }
}

pub fn de<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Raw::deserialize(d)?.value()
}

pub fn de_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Vec::<Raw>::deserialize(d)?
        .into_iter()
        .map(Raw::value)
        .collect()
}

pub fn de_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(r) => r.value().map(Some),
    }
}
