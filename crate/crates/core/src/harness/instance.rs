//! JSON-lines instance files: a header line `{"d":..,"N":..,"alpha":..}`
//! followed by one shape record per line, in arrival order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::{has_grid_point, FatObject, Fatness, GridSpec};
use crate::scalar::Scalar;
use crate::{Rational, Surd};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceHeader {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: i64,
    pub alpha: Fatness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile<T> {
    pub header: InstanceHeader,
    pub objects: Vec<FatObject<T>>,
}

impl<T: Scalar> InstanceFile<T> {
    pub fn new(header: InstanceHeader, objects: Vec<FatObject<T>>) -> Self {
        InstanceFile { header, objects }
    }

    pub fn grid(&self) -> Result<GridSpec, HarnessError> {
        Ok(GridSpec::new(self.header.d, self.header.n)?)
    }

    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, htext) = lines.next().ok_or(HarnessError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header: InstanceHeader = serde_json::from_str(htext).map_err(|e| HarnessError::Parse {
            line: hline,
            msg: format!("bad header: {e}"),
        })?;
        let mut objects = Vec::new();
        let mut line_of = Vec::new();
        for (line, l) in lines {
            let o: FatObject<T> = serde_json::from_str(l).map_err(|e| HarnessError::Parse {
                line,
                msg: e.to_string(),
            })?;
            objects.push(o);
            line_of.push(line);
        }
        let inst = InstanceFile { header, objects };
        inst.check(|i| line_of[i]).map_err(|e| match e {
            HarnessError::Geometry(g) => HarnessError::Parse {
                line: hline,
                msg: g.to_string(),
            },
            e => e,
        })?;
        Ok(inst)
    }

    /// Every object has the header's dimension, lies in the grid, is no
    /// fatter than the header allows and contains a grid point.
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.check(|i| i + 2)
    }

    fn check(&self, line_of: impl Fn(usize) -> usize) -> Result<(), HarnessError> {
        let grid = self.grid()?;
        for (index, o) in self.objects.iter().enumerate() {
            let bad = |msg: String| HarnessError::InvalidObject {
                index,
                line: line_of(index),
                msg,
            };
            if o.dim() != grid.dim() {
                return Err(bad(format!("dimension {} but the header says {}", o.dim(), grid.dim())));
            }
            if !o.is_inside(&grid) {
                return Err(bad(format!("not inside (0, {})^{}", grid.n(), grid.dim())));
            }
            let fat = o.fatness();
            if fat > self.header.alpha {
                return Err(bad(format!("fatness {fat} exceeds alpha = {}", self.header.alpha)));
            }
            if !has_grid_point(&grid, o) {
                return Err(bad("contains no grid point".into()));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string(&self.header).expect("header serializes");
        s.push('\n');
        for o in &self.objects {
            let _ = writeln!(s, "{}", serde_json::to_string(o).expect("shape serializes"));
        }
        s
    }
}

/// An instance in the narrowest number type that holds it.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyInstance {
    Rational(InstanceFile<Rational>),
    Surd(InstanceFile<Surd>),
}

impl AnyInstance {
    /// Tries plain rationals first, then values with square roots.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        match InstanceFile::<Rational>::parse(text) {
            Ok(i) => Ok(AnyInstance::Rational(i)),
            Err(e @ HarnessError::Parse { .. }) => InstanceFile::<Surd>::parse(text)
                .map(AnyInstance::Surd)
                .map_err(|_| e),
            Err(e) => Err(e),
        }
    }

    pub fn header(&self) -> &InstanceHeader {
        match self {
            AnyInstance::Rational(i) => &i.header,
            AnyInstance::Surd(i) => &i.header,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIVE: &str = r#"{"d":2,"N":16,"alpha":1}
{"shape":"cube","corner":["7/2","7/2"],"width":2}
{"shape":"cube","corner":["9/2","9/2"],"width":2}
{"shape":"cube","corner":["7/2","9/2"],"width":2}
{"shape":"cube","corner":["9/2","7/2"],"width":2}
{"shape":"cube","corner":["21/2","21/2"],"width":2}
"#;

    #[test]
    fn round_trip_is_exact() {
        let inst = InstanceFile::<Rational>::parse(FIVE).unwrap();
        assert_eq!(inst.objects.len(), 5);
        assert_eq!(inst.to_text(), FIVE);
        assert_eq!(InstanceFile::parse(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "{\"d\":2,\"N\":16,\"alpha\":1}\n\n{\"shape\":\"cube\",\"corner\":[1,1],\"width\":2}\n{\"shape\":\"cube\",\"corner\":[1,1]}\n";
        match InstanceFile::<Rational>::parse(text) {
            Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let text = "{\"d\":2,\"N\":16,\"alpha\":1}\n{\"shape\":\"cube\",\"corner\":[1,1],\"width\":2}\n{\"shape\":\"cube\",\"corner\":[10,10],\"width\":7}\n";
        match InstanceFile::<Rational>::parse(text) {
            Err(HarnessError::InvalidObject { index, line, msg }) => {
                assert_eq!((index, line), (1, 3));
                assert!(msg.contains("inside"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fatness_and_emptiness_are_checked() {
        let fat = "{\"d\":2,\"N\":16,\"alpha\":1}\n{\"shape\":\"ball\",\"center\":[8,8],\"radius\":2}\n";
        assert!(matches!(
            InstanceFile::<Rational>::parse(fat),
            Err(HarnessError::InvalidObject { .. })
        ));
        let empty = "{\"d\":2,\"N\":16,\"alpha\":1}\n{\"shape\":\"cube\",\"corner\":[\"1/4\",\"1/4\"],\"width\":\"1/2\"}\n";
        match InstanceFile::<Rational>::parse(empty) {
            Err(HarnessError::InvalidObject { msg, .. }) => assert!(msg.contains("no grid point")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            InstanceFile::<Rational>::parse("{\"d\":2,\"N\":1,\"alpha\":1}\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn surd_values_fall_back() {
        let text = "{\"d\":2,\"N\":16,\"alpha\":\"sqrt(2)\"}\n{\"shape\":\"ball\",\"center\":[8,8],\"radius\":\"0+2*sqrt(2)\"}\n";
        let inst = AnyInstance::parse(text).unwrap();
        assert!(matches!(inst, AnyInstance::Surd(_)));
        assert_eq!(inst.header().alpha, Fatness::sqrt_of(2).unwrap());
        let AnyInstance::Surd(i) = inst else { unreachable!() };
        assert_eq!(i.to_text(), text);
    }

    #[test]
    fn empty_instance() {
        let inst = InstanceFile::<Rational>::parse("{\"d\":1,\"N\":4,\"alpha\":1,\"seed\":3}").unwrap();
        assert!(inst.objects.is_empty());
        assert_eq!(inst.header.seed, Some(3));
    }
}
