//! Body and lattice files.
//!
//! One TOML document per file with a `kind` field:
//!
//! ```toml
//! kind = "polygon"
//! sides = 6
//! circumradius = 1.0
//! ```
//!
//! Body kinds are `box`, `cube`, `ball`, `hpolytope` and `polygon`; lattice
//! kinds are `lattice` and `integer`.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use turan::{ConvexBody, Lattice};

/// A configuration problem with the file and, when known, the line and field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: String,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct BoxCfg {
    kind: String,
    halfwidths: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct CubeCfg {
    kind: String,
    dim: usize,
    halfwidth: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct BallCfg {
    kind: String,
    dim: usize,
    radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct PolytopeCfg {
    kind: String,
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct PolygonCfg {
    kind: String,
    sides: usize,
    circumradius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct LatticeCfg {
    kind: String,
    columns: Vec<Vec<f64>>,
    #[serde(default = "one")]
    scale: f64,
    #[serde(default)]
    dual: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct IntegerCfg {
    kind: String,
    dim: usize,
    #[serde(default = "one")]
    scale: f64,
    #[serde(default)]
    dual: bool,
}

fn one() -> f64 {
    1.0
}

struct Source<'a> {
    file: String,
    text: &'a str,
}

impl Source<'_> {
    fn line_of_offset(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    // First line assigning `key` at the top level.
    fn line_of_key(&self, key: &str) -> Option<usize> {
        self.text
            .lines()
            .position(|l| {
                let t = l.trim_start();
                t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
            })
            .map(|i| i + 1)
    }

    fn error(&self, field: Option<&str>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            file: self.file.clone(),
            line: field.and_then(|f| self.line_of_key(f)),
            field: field.map(str::to_string),
            message: message.into(),
        }
    }

    fn toml_error(&self, e: toml::de::Error) -> ConfigError {
        let message = e.message().trim().to_string();
        let field = backticked(&message);
        let line = e
            .span()
            .map(|s| self.line_of_offset(s.start))
            .or_else(|| field.as_deref().and_then(|f| self.line_of_key(f)));
        ConfigError { file: self.file.clone(), line, field, message }
    }

    fn parse<T: DeserializeOwned>(&self) -> Result<T, ConfigError> {
        toml::from_str(self.text).map_err(|e| self.toml_error(e))
    }

    fn kind(&self) -> Result<String, ConfigError> {
        let table: toml::Table = self.parse()?;
        match table.get("kind") {
            Some(toml::Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(self.error(Some("kind"), "must be a string")),
            None => Err(ConfigError {
                file: self.file.clone(),
                line: None,
                field: Some("kind".into()),
                message: "missing".into(),
            }),
        }
    }
}

// serde messages name the offending field in backticks.
fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: path.display().to_string(),
        line: None,
        field: None,
        message: format!("cannot read: {e}"),
    })
}

fn file_name(path: &Path) -> String {
    path.display().to_string()
}

pub fn load_body(path: &Path) -> Result<ConvexBody, ConfigError> {
    let text = read(path)?;
    parse_body(&file_name(path), &text)
}

pub fn load_lattice(path: &Path) -> Result<Lattice, ConfigError> {
    let text = read(path)?;
    parse_lattice(&file_name(path), &text)
}

pub fn parse_body(file: &str, text: &str) -> Result<ConvexBody, ConfigError> {
    let src = Source { file: file.to_string(), text };
    let kind = src.kind()?;
    match kind.as_str() {
        "box" => {
            let c: BoxCfg = src.parse()?;
            ConvexBody::boxed(c.halfwidths).map_err(|e| src.error(Some("halfwidths"), e.to_string()))
        }
        "cube" => {
            let c: CubeCfg = src.parse()?;
            if c.dim == 0 {
                return Err(src.error(Some("dim"), "must be at least 1"));
            }
            ConvexBody::cube(c.dim, c.halfwidth).map_err(|e| src.error(Some("halfwidth"), e.to_string()))
        }
        "ball" => {
            let c: BallCfg = src.parse()?;
            if c.dim == 0 {
                return Err(src.error(Some("dim"), "must be at least 1"));
            }
            ConvexBody::ball(c.dim, c.radius).map_err(|e| src.error(Some("radius"), e.to_string()))
        }
        "hpolytope" => {
            let c: PolytopeCfg = src.parse()?;
            if c.normals.len() != c.offsets.len() {
                return Err(
                    src.error(Some("offsets"), format!("{} offsets for {} normals", c.offsets.len(), c.normals.len()))
                );
            }
            ConvexBody::hpolytope(c.normals.into_iter().zip(c.offsets).collect())
                .map_err(|e| src.error(Some("normals"), e.to_string()))
        }
        "polygon" => {
            let c: PolygonCfg = src.parse()?;
            ConvexBody::regular_polygon(c.sides, c.circumradius).map_err(|e| src.error(Some("sides"), e.to_string()))
        }
        other => Err(src.error(
            Some("kind"),
            format!("unknown body kind {other:?}; expected box, cube, ball, hpolytope or polygon"),
        )),
    }
}

pub fn parse_lattice(file: &str, text: &str) -> Result<Lattice, ConfigError> {
    let src = Source { file: file.to_string(), text };
    let kind = src.kind()?;
    let (lattice, scale, dual) = match kind.as_str() {
        "lattice" => {
            let c: LatticeCfg = src.parse()?;
            let lat = Lattice::from_columns(&c.columns).map_err(|e| src.error(Some("columns"), e.to_string()))?;
            (lat, c.scale, c.dual)
        }
        "integer" => {
            let c: IntegerCfg = src.parse()?;
            if c.dim == 0 {
                return Err(src.error(Some("dim"), "must be at least 1"));
            }
            (Lattice::integer(c.dim), c.scale, c.dual)
        }
        other => {
            return Err(src.error(Some("kind"), format!("unknown lattice kind {other:?}; expected lattice or integer")))
        }
    };
    if !(scale.is_finite() && scale > 0.0) {
        return Err(src.error(Some("scale"), format!("must be positive, got {scale}")));
    }
    let scaled = Lattice::new(lattice.generator() * scale).map_err(|e| src.error(Some("scale"), e.to_string()))?;
    if dual {
        scaled.dual().map_err(|e| src.error(Some("dual"), e.to_string()))
    } else {
        Ok(scaled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bodies_parse() {
        let hex = parse_body("hex.toml", "kind = \"polygon\"\nsides = 6\ncircumradius = 1.0\n").unwrap();
        assert!((hex.exact_volume().unwrap() - 1.5 * 3f64.sqrt()).abs() < 1e-12);
        let sq =
            parse_body("sq.toml", "kind = \"hpolytope\"\nnormals = [[1.0, 0.0], [0.0, 1.0]]\noffsets = [1.0, 1.0]\n")
                .unwrap();
        assert_eq!(sq.extent(), &[1.0, 1.0]);
        assert_eq!(parse_body("c", "kind = \"cube\"\ndim = 3\nhalfwidth = 0.5").unwrap().dim(), 3);
    }

    #[test]
    fn errors_carry_line_and_field() {
        let e = parse_body("disk.toml", "kind = \"ball\"\ndim = 2\nradius = -1.0\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(3), Some("radius")));
        let e = parse_body("disk.toml", "kind = \"ball\"\ndim = 2\nradius = \"one\"\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = parse_body("disk.toml", "kind = \"ball\"\ndim = 2\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("radius"));
        let e = parse_body("disk.toml", "kind = \"ball\"\ndim = 2\nradius = 1\ncolour = 3\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("colour"));
        assert_eq!(e.line, Some(4));
        let e = parse_body("x.toml", "kind = \"blob\"\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(1), Some("kind")));
        let e = parse_body("x.toml", "kind = \"box\"\nhalfwidths = [1.0,\n").unwrap_err();
        assert!(e.line.is_some(), "{e}");
    }

    #[test]
    fn lattices_parse() {
        let z2 = parse_lattice("z", "kind = \"integer\"\ndim = 2\n").unwrap();
        assert!(z2.same_points(&Lattice::integer(2), 1e-12));
        let hex = parse_lattice(
            "h",
            "kind = \"lattice\"\ncolumns = [[1.5, 0.8660254037844386], [0.0, 1.7320508075688772]]\ndual = true\n",
        )
        .unwrap();
        assert!((hex.determinant().abs() - 1.0 / (1.5 * 3f64.sqrt())).abs() < 1e-12);
        let e = parse_lattice("z", "kind = \"lattice\"\ncolumns = [[1.0, 0.0], [2.0, 0.0]]\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(2), Some("columns")));
    }
}
