//! JSON form of shapes:
//! `{"shape":"cube","corner":[..],"width":w}`,
//! `{"shape":"ball","center":[..],"radius":r}`,
//! `{"shape":"box","corner":[..],"widths":[..]}`.
//! Integral values are JSON integers; anything else is a string in the
//! scalar's text form (`"p/q"` for rationals).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FatObject, GeometryError};
use crate::scalar::Scalar;

/// A scalar with the JSON encoding above.
#[derive(Clone, Debug, PartialEq)]
pub struct Num<T>(pub T);

impl<T: Scalar> Serialize for Num<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        if let Some(q) = self.0.to_rational().filter(|q| q.is_integer()) {
            if let Some(i) = q.to_integer().to_i64() {
                return s.serialize_i64(i);
            }
        }
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Num<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Num(T::from_int(i))),
                None => Err(D::Error::custom(format!(
                    "non-integer number {n}; write fractions as \"p/q\" strings"
                ))),
            },
            serde_json::Value::String(s) => T::parse_text(&s)
                .map(Num)
                .ok_or_else(|| D::Error::custom(format!("cannot parse number {s:?}"))),
            other => Err(D::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum ShapeRecord<T> {
    Cube { corner: Vec<Num<T>>, width: Num<T> },
    Ball { center: Vec<Num<T>>, radius: Num<T> },
    Box { corner: Vec<Num<T>>, widths: Vec<Num<T>> },
}

fn unwrap<T>(v: Vec<Num<T>>) -> Vec<T> {
    v.into_iter().map(|n| n.0).collect()
}

fn wrap<T: Clone>(v: &[T]) -> Vec<Num<T>> {
    v.iter().cloned().map(Num).collect()
}

impl<T: Scalar> TryFrom<ShapeRecord<T>> for FatObject<T> {
    type Error = GeometryError;

    fn try_from(r: ShapeRecord<T>) -> Result<Self, Self::Error> {
        match r {
            ShapeRecord::Cube { corner, width } => FatObject::cube(unwrap(corner), width.0),
            ShapeRecord::Ball { center, radius } => FatObject::ball(unwrap(center), radius.0),
            ShapeRecord::Box { corner, widths } => FatObject::axis_box(unwrap(corner), unwrap(widths)),
        }
    }
}

impl<T: Scalar> From<&FatObject<T>> for ShapeRecord<T> {
    fn from(o: &FatObject<T>) -> Self {
        match o {
            FatObject::Cube(c) => ShapeRecord::Cube {
                corner: wrap(c.corner()),
                width: Num(c.width().clone()),
            },
            FatObject::Ball(b) => ShapeRecord::Ball {
                center: wrap(b.center()),
                radius: Num(b.radius().clone()),
            },
            FatObject::Box(b) => ShapeRecord::Box {
                corner: wrap(b.corner()),
                widths: wrap(b.widths()),
            },
        }
    }
}

impl<T: Scalar> Serialize for FatObject<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ShapeRecord::from(self).serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for FatObject<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ShapeRecord::<T>::deserialize(d)?;
        FatObject::try_from(r).map_err(serde::de::Error::custom)
    }
}

impl<T: Scalar> Serialize for super::Cube<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(bound = "T: Scalar")]
        struct Repr<T: Scalar> {
            corner: Vec<Num<T>>,
            width: Num<T>,
        }
        Repr {
            corner: wrap(self.corner()),
            width: Num(self.width().clone()),
        }
        .serialize(s)
    }
}
