//! Serializes big integers as plain JSON numbers.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::ser::{Error, SerializeSeq};
use serde::Serializer;

fn number<S: Serializer>(s: S, text: String) -> Result<S::Ok, S::Error> {
    let n = serde_json::Number::from_str(&text).map_err(S::Error::custom)?;
    serde::Serialize::serialize(&n, s)
}

pub fn uint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    number(s, v.to_string())
}

pub fn uint_vec<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        let n = serde_json::Number::from_str(&x.to_string()).map_err(S::Error::custom)?;
        seq.serialize_element(&n)?;
    }
    seq.end()
}

pub fn int_rows<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let nums = row
            .iter()
            .map(|x| serde_json::Number::from_str(&x.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(S::Error::custom)?;
        seq.serialize_element(&nums)?;
    }
    seq.end()
}
