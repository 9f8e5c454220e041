//! Serde adapters rendering `Nat` as decimal strings.
//!
//! JSON numbers lose precision past 2^53 in most consumers, so every
//! arbitrary-precision field in checkpoints and output records is a
//! decimal string.

use crate::types::Nat;

pub mod decimal {
    use super::Nat;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse::<Nat>()
            .map_err(|_| de::Error::custom(format!("not a decimal natural number: {raw:?}")))
    }
}

pub mod decimal_opt {
    use super::Nat;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Option<Nat>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Nat>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|txt| {
            txt.parse::<Nat>()
                .map_err(|_| de::Error::custom(format!("not a decimal natural number: {txt:?}")))
        })
        .transpose()
    }
}

pub mod decimal_vec {
    use super::Nat;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Nat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|n| n.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Nat>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|txt| {
                txt.parse::<Nat>().map_err(|_| {
                    de::Error::custom(format!("not a decimal natural number: {txt:?}"))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        #[serde(with = "decimal")]
        n: Nat,
        #[serde(with = "decimal_opt")]
        maybe: Option<Nat>,
        #[serde(with = "decimal_vec")]
        list: Vec<Nat>,
    }

    #[test]
    fn decimal_round_trip() {
        let s = Sample {
            n: "340282366920938463463374607431768211456".parse().unwrap(),
            maybe: None,
            list: vec![Nat::from(1u32), Nat::from(27u32)],
        };
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"340282366920938463463374607431768211456\""));
        let back: Sample = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_garbage() {
        let bad = r#"{"n":"12x","maybe":null,"list":[]}"#;
        assert!(serde_json::from_str::<Sample>(bad).is_err());
    }
}
