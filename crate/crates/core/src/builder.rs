//! One-line law specifications: `name:param[,param]`.
//!
//! | spec | law |
//! |---|---|
//! | `iid:p` | independent directions |
//! | `dng:p` | degree-constrained `(k, ε)` law with `2dp = k + ε` |
//! | `aon:p` | all-or-nothing |
//! | `corner:alpha` | corner/stick (d = 2) |
//! | `soft-opp:eps`, `soft-perp:eps` | soft stick / soft corner (d = 2) |
//! | `exch:a0,a1,...,a2d` | exchangeable with degree masses `a_j` |
//! | `point:+x\|-y` | point mass on one mask |
//! | `empty` | `δ_∅` |
//! | `mix:p,<spec>` | `p·Q + (1 − p)·δ_∅` |
//! | `file:path` | JSON or CSV law file |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::law::LocalLaw;
use crate::mask::NeighborMask;
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub enum LawBuilder {
    Iid(String),
    Dng(String),
    AllOrNothing(String),
    CornerStick(String),
    SoftOpposite(String),
    SoftPerpendicular(String),
    Exchangeable(Vec<String>),
    Point(String),
    Empty,
    Mix(String, Box<LawBuilder>),
    File(PathBuf),
}

fn one_param<'a>(name: &str, params: Option<&'a str>) -> Result<&'a str> {
    match params {
        Some(p) if !p.trim().is_empty() && !p.contains(',') => Ok(p.trim()),
        _ => Err(Error::Parse(format!("`{name}` takes exactly one parameter, e.g. `{name}:0.5`"))),
    }
}

impl FromStr for LawBuilder {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, params) = match text.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p)),
            None => (text, None),
        };
        let spec = match name {
            "iid" => LawBuilder::Iid(one_param(name, params)?.into()),
            "dng" => LawBuilder::Dng(one_param(name, params)?.into()),
            "aon" => LawBuilder::AllOrNothing(one_param(name, params)?.into()),
            "corner" | "corner-stick" => LawBuilder::CornerStick(one_param(name, params)?.into()),
            "soft-opp" => LawBuilder::SoftOpposite(one_param(name, params)?.into()),
            "soft-perp" => LawBuilder::SoftPerpendicular(one_param(name, params)?.into()),
            "exch" => {
                let params = params.ok_or_else(|| Error::Parse("`exch` needs degree masses `exch:a0,...,a2d`".into()))?;
                LawBuilder::Exchangeable(params.split(',').map(|s| s.trim().to_string()).collect())
            }
            "point" => LawBuilder::Point(one_param(name, params)?.into()),
            "empty" if params.is_none() => LawBuilder::Empty,
            "mix" => {
                let (p, inner) = params
                    .and_then(|s| s.split_once(','))
                    .ok_or_else(|| Error::Parse("`mix` expects `mix:p,<spec>`".into()))?;
                LawBuilder::Mix(p.trim().into(), Box::new(inner.parse()?))
            }
            "file" => LawBuilder::File(PathBuf::from(one_param(name, params)?)),
            other => return Err(Error::Parse(format!("unknown law {other:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for LawBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawBuilder::Iid(p) => write!(f, "iid:{p}"),
            LawBuilder::Dng(p) => write!(f, "dng:{p}"),
            LawBuilder::AllOrNothing(p) => write!(f, "aon:{p}"),
            LawBuilder::CornerStick(a) => write!(f, "corner:{a}"),
            LawBuilder::SoftOpposite(e) => write!(f, "soft-opp:{e}"),
            LawBuilder::SoftPerpendicular(e) => write!(f, "soft-perp:{e}"),
            LawBuilder::Exchangeable(a) => write!(f, "exch:{}", a.join(",")),
            LawBuilder::Point(m) => write!(f, "point:{m}"),
            LawBuilder::Empty => f.write_str("empty"),
            LawBuilder::Mix(p, inner) => write!(f, "mix:{p},{inner}"),
            LawBuilder::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

fn check_planar(dim: usize, name: &str) -> Result<()> {
    if dim != 2 {
        return Err(Error::domain(format!("`{name}` is a two-dimensional law, got d = {dim}")));
    }
    Ok(())
}

impl LawBuilder {
    /// Builds the law in `d` dimensions. File laws are float-only.
    pub fn build<T: Weight>(&self, dim: usize) -> Result<LocalLaw<T>> {
        match self {
            LawBuilder::Iid(p) => LocalLaw::iid(dim, T::parse_value(p)?),
            LawBuilder::Dng(p) => LocalLaw::dng(dim, T::parse_value(p)?),
            LawBuilder::AllOrNothing(p) => LocalLaw::all_or_nothing(dim, T::parse_value(p)?),
            LawBuilder::CornerStick(a) => {
                check_planar(dim, "corner")?;
                LocalLaw::corner_stick(T::parse_value(a)?)
            }
            LawBuilder::SoftOpposite(e) => {
                check_planar(dim, "soft-opp")?;
                LocalLaw::soft_opposite(T::parse_value(e)?)
            }
            LawBuilder::SoftPerpendicular(e) => {
                check_planar(dim, "soft-perp")?;
                LocalLaw::soft_perpendicular(T::parse_value(e)?)
            }
            LawBuilder::Exchangeable(alphas) => {
                let alphas = alphas.iter().map(|a| T::parse_value(a)).collect::<Result<Vec<T>>>()?;
                Ok(LocalLaw::exchangeable(&DegreeDistribution::new(dim, alphas)?))
            }
            LawBuilder::Point(mask) => LocalLaw::point_mass(dim, NeighborMask::parse(mask, dim)?),
            LawBuilder::Empty => LocalLaw::empty(dim),
            LawBuilder::Mix(p, inner) => inner.build::<T>(dim)?.mix_with_empty(T::parse_value(p)?),
            LawBuilder::File(path) => {
                if T::EXACT {
                    return Err(Error::Unsupported(format!(
                        "law file {} holds floats and cannot be used in exact mode",
                        path.display()
                    )));
                }
                let law = load_law_file(path, dim)?;
                let probs = law.probs().iter().map(|x| T::parse_value(&format!("{x:e}"))).collect::<Result<Vec<T>>>()?;
                LocalLaw::from_probs(dim, probs)
            }
        }
    }
}

/// Reads a JSON (`.json`) or CSV law file and checks its dimension.
pub fn load_law_file(path: &std::path::Path, dim: usize) -> Result<LocalLaw<f64>> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{');
    let law = if is_json { LocalLaw::from_json(&text)? } else { LocalLaw::from_csv(&text, dim)? };
    if law.dim() != dim {
        return Err(Error::DimensionMismatch { left: law.dim(), right: dim });
    }
    Ok(law)
}

/// A one-parameter family of laws, used by scans and bisection.
#[derive(Clone, Debug, PartialEq)]
pub enum LawFamily {
    Iid,
    Dng,
    AllOrNothing,
    CornerStick,
    SoftOpposite,
    SoftPerpendicular,
    /// `p ↦ p·Q + (1 − p)·δ_∅` for a fixed `Q`.
    Mix(Box<LawBuilder>),
}

impl FromStr for LawFamily {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        Ok(match text {
            "iid" => LawFamily::Iid,
            "dng" => LawFamily::Dng,
            "aon" => LawFamily::AllOrNothing,
            "corner" | "corner-stick" => LawFamily::CornerStick,
            "soft-opp" => LawFamily::SoftOpposite,
            "soft-perp" => LawFamily::SoftPerpendicular,
            _ => match text.strip_prefix("mix:") {
                Some(inner) => LawFamily::Mix(Box::new(inner.parse()?)),
                None => return Err(Error::Parse(format!("unknown law family {text:?}"))),
            },
        })
    }
}

impl fmt::Display for LawFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawFamily::Iid => f.write_str("iid"),
            LawFamily::Dng => f.write_str("dng"),
            LawFamily::AllOrNothing => f.write_str("aon"),
            LawFamily::CornerStick => f.write_str("corner"),
            LawFamily::SoftOpposite => f.write_str("soft-opp"),
            LawFamily::SoftPerpendicular => f.write_str("soft-perp"),
            LawFamily::Mix(inner) => write!(f, "mix:{inner}"),
        }
    }
}

impl LawFamily {
    /// Parameter interval on which the family is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            LawFamily::CornerStick => (0.0, 0.25),
            _ => (0.0, 1.0),
        }
    }

    pub fn builder(&self, param: f64) -> LawBuilder {
        let p = format!("{param}");
        match self {
            LawFamily::Iid => LawBuilder::Iid(p),
            LawFamily::Dng => LawBuilder::Dng(p),
            LawFamily::AllOrNothing => LawBuilder::AllOrNothing(p),
            LawFamily::CornerStick => LawBuilder::CornerStick(p),
            LawFamily::SoftOpposite => LawBuilder::SoftOpposite(p),
            LawFamily::SoftPerpendicular => LawBuilder::SoftPerpendicular(p),
            LawFamily::Mix(inner) => LawBuilder::Mix(p, inner.clone()),
        }
    }

    pub fn build(&self, dim: usize, param: f64) -> Result<LocalLaw<f64>> {
        if !param.is_finite() {
            return Err(Error::domain(format!("parameter {param} is not finite")));
        }
        self.builder(param).build(dim)
    }
}
