//! Serde helpers that write non-finite floats as the strings `"+inf"`,
//! `"-inf"` and `"nan"`, keeping reports valid JSON.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Repr<'a> {
    Num(f64),
    #[serde(borrow)]
    Tag(&'a str),
}

fn to_repr(v: f64) -> Repr<'static> {
    if v == f64::INFINITY {
        Repr::Tag("+inf")
    } else if v == f64::NEG_INFINITY {
        Repr::Tag("-inf")
    } else if v.is_nan() {
        Repr::Tag("nan")
    } else {
        Repr::Num(v)
    }
}

fn from_tag<E: de::Error>(s: &str) -> Result<f64, E> {
    match s {
        "+inf" | "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        other => Err(E::custom(format!("unexpected float tag `{other}`"))),
    }
}

struct ExtVisitor;

impl<'de> Visitor<'de> for ExtVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a number or one of \"+inf\", \"-inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        from_tag(v)
    }
}

pub mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtVisitor)
    }
}

pub mod ext_f64_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&to_repr(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::ext_f64")] f64);
        let v: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    struct S {
        #[serde(with = "super::ext_f64")]
        a: f64,
        #[serde(with = "super::ext_f64_vec")]
        b: Vec<f64>,
    }

    #[test]
    fn round_trips_infinities() {
        let s = S {
            a: f64::NEG_INFINITY,
            b: vec![1.5, f64::INFINITY],
        };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"a":"-inf","b":[1.5,"+inf"]}"#);
        assert_eq!(serde_json::from_str::<S>(&text).unwrap(), s);
    }
}
