//! Percolation thresholds for DnG and BnG derived from an upper bound on the
//! bond threshold `p_c(d)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A finite decimal `mantissa · 10^(−scale)`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    mantissa: BigInt,
    scale: u32,
}

impl Decimal {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse(format!("not a plain decimal: {text:?}"));
        let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mantissa: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
        Ok(Decimal { mantissa, scale: frac_part.len() as u32 })
    }

    pub fn times(&self, k: u64) -> Self {
        Decimal { mantissa: &self.mantissa * BigInt::from(k), scale: self.scale }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), num_traits::pow(BigInt::from(10u32), self.scale as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.mantissa.abs().to_string();
        let scale = self.scale as usize;
        let padded = format!("{digits:0>width$}", width = scale + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - scale);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        if frac_part.is_empty() {
            write!(f, "{sign}{int_part}")
        } else {
            write!(f, "{sign}{int_part}.{frac_part}")
        }
    }
}

/// An upper bound on `p_c(d)` together with its source.
#[derive(Clone, Debug, PartialEq)]
pub struct PcBound {
    pub d: usize,
    pub value: Decimal,
    pub citation: String,
}

const BUILTIN: [(usize, &str, &str); 4] = [
    (2, "0.5", "Kesten (1980): p_c(2) = 1/2 for bond percolation on Z^2"),
    (3, "0.347297", "rigorous upper bound p_c(3) <= 0.347297 (YW percolation bound)"),
    (4, "0.2788", "Gomes et al. (2021), upper bounds on p_c(d), p. 14: p_c(4) <= 0.2788"),
    (5, "0.2284", "Gomes et al. (2021), upper bounds on p_c(d), p. 14: p_c(5) <= 0.2284"),
];

pub fn builtin_pc_upper(d: usize) -> Option<PcBound> {
    BUILTIN.iter().find(|(dim, _, _)| *dim == d).map(|(dim, value, citation)| PcBound {
        d: *dim,
        value: Decimal::parse(value).expect("built-in constant"),
        citation: citation.to_string(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Yes,
    No,
    Open,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Yes => "yes",
            Status::No => "no",
            Status::Open => "open",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KRow {
    pub k: u64,
    pub dng: Status,
    pub bng: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub d: usize,
    pub pc_upper: String,
    pub citation: String,
    /// `2d · pc_upper`, exact.
    pub dng_threshold: String,
    /// `1 + 2d·sqrt(pc_upper)`, rounded for display.
    pub bng_bound: f64,
    /// Smallest integer `k > 1 + 2d·sqrt(pc_upper)`.
    pub bng_percolates_from: u64,
    /// `⌊sqrt(2d)⌋`.
    pub bng_no_percolation_up_to: u64,
    pub lines: Vec<String>,
    pub table: Vec<KRow>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Largest integer `m` with `m² ≤ x`, for rational `x ≥ 0`.
fn floor_sqrt_rational(x: &BigRational) -> u64 {
    let mut m = 0u64;
    while BigRational::from_integer(BigInt::from((m + 1) * (m + 1))) <= *x {
        m += 1;
    }
    m
}

/// Threshold lines for dimension `d`; `pc_upper` overrides the built-in table.
pub fn report_thresholds(d: usize, pc_upper: Option<&str>) -> Result<ThresholdReport> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let bound = match pc_upper {
        Some(text) => PcBound { d, value: Decimal::parse(text)?, citation: "user-supplied upper bound".into() },
        None => builtin_pc_upper(d).ok_or_else(|| {
            Error::domain(format!("no built-in bound on p_c({d}); supply one with --pc-upper"))
        })?,
    };
    let pc = bound.value.to_rational();
    if !(pc > BigRational::zero() && pc <= BigRational::from_integer(1.into())) {
        return Err(Error::domain(format!("p_c upper bound {} outside (0, 1]", bound.value)));
    }
    let two_d = 2 * d as u64;
    let dng = bound.value.times(two_d);
    let dng_rational = dng.to_rational();
    // 1 + 2d·sqrt(pc) < k  ⇔  k ≥ ⌊2d·sqrt(pc)⌋ + 2.
    let scaled = BigRational::from_integer(BigInt::from(two_d * two_d)) * pc.clone();
    let bng_from = floor_sqrt_rational(&scaled) + 2;
    let bng_no = isqrt(two_d);
    let bng_bound = 1.0 + two_d as f64 * bound.value.to_f64().sqrt();

    let mut lines = vec![
        format!("p_c({d}) ≤ {} [{}]", bound.value, bound.citation),
        format!("DnG percolates for 2dp > {dng}"),
    ];
    if bng_from <= two_d {
        lines.push(format!("BnG percolates for integer 2dp ≥ {bng_from}"));
    } else {
        lines.push(format!("BnG percolation not implied for any integer 2dp ≤ {two_d}"));
    }
    lines.push(format!("BnG does not percolate for 2dp ≤ {bng_no}"));

    let table = (0..=two_d)
        .map(|k| KRow {
            k,
            dng: if BigRational::from_integer(BigInt::from(k)) > dng_rational { Status::Yes } else { Status::Open },
            bng: if k >= bng_from {
                Status::Yes
            } else if k <= bng_no {
                Status::No
            } else {
                Status::Open
            },
        })
        .collect();

    Ok(ThresholdReport {
        d,
        pc_upper: bound.value.to_string(),
        citation: bound.citation,
        dng_threshold: dng.to_string(),
        bng_bound,
        bng_percolates_from: bng_from,
        bng_no_percolation_up_to: bng_no,
        lines,
        table,
    })
}

impl fmt::Display for ThresholdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "k\tDnG\tBnG")?;
        for row in &self.table {
            writeln!(f, "{}\t{}\t{}", row.k, row.dng, row.bng)?;
        }
        Ok(())
    }
}
