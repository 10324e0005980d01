use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fit::least_squares;
use crate::numeric::{median, min_max};

/// The inequality a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "ThmB_ball")]
    ThmBBall,
    #[serde(rename = "ThmB_gauss")]
    ThmBGauss,
    #[serde(rename = "ThmC_density")]
    ThmCDensity,
    #[serde(rename = "ThmD_hardy")]
    ThmDHardy,
    #[serde(rename = "Strichartz_upper")]
    StrichartzUpper,
    #[serde(rename = "Hudson_discrete")]
    HudsonDiscrete,
    #[serde(rename = "Hudson_coherent")]
    HudsonCoherent,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::ThmBBall,
        TheoremId::ThmBGauss,
        TheoremId::ThmCDensity,
        TheoremId::ThmDHardy,
        TheoremId::StrichartzUpper,
        TheoremId::HudsonDiscrete,
        TheoremId::HudsonCoherent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::ThmBBall => "ThmB_ball",
            TheoremId::ThmBGauss => "ThmB_gauss",
            TheoremId::ThmCDensity => "ThmC_density",
            TheoremId::ThmDHardy => "ThmD_hardy",
            TheoremId::StrichartzUpper => "Strichartz_upper",
            TheoremId::HudsonDiscrete => "Hudson_discrete",
            TheoremId::HudsonCoherent => "Hudson_coherent",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| crate::Error::Validation(format!("unknown theorem id {s:?}")))
    }
}

/// Which quotient the inequality bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `lhs ≤ C · rhs(L)`: the ratio is `lhs / rhs(L)`.
    FixedOverSeries,
    /// `rhs(L) ≤ C · lhs`: the ratio is `rhs(L) / lhs`.
    SeriesOverFixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Thresholds turning a finite ratio series into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateauGate {
    /// Largest admissible max/min over the last half of the series.
    pub factor: f64,
    /// Largest admissible |slope| of `ln ratio` against `ln L` over the last
    /// half.
    pub slope: f64,
}

impl Default for PlateauGate {
    fn default() -> Self {
        Self {
            factor: 10.0,
            slope: 0.05,
        }
    }
}

/// Summary of the last half of a ratio series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub median: f64,
    /// max/min over the last half.
    pub bracket: f64,
    pub trend_slope: f64,
}

/// Median, bracket and trend over the last `⌈len/2⌉` points, and the
/// verdict they imply.
///
/// A series that rises faster than the slope gate diverges. One that falls
/// faster is inconclusive, since the bound then holds only vacuously.
/// A flat series is bounded when its bracket is within the gate factor.
pub fn classify(ratios: &[(f64, f64)], gate: &PlateauGate) -> (Plateau, Verdict) {
    let tail = &ratios[ratios.len() / 2..];
    let values: Vec<f64> = tail.iter().map(|&(_, r)| r).collect();
    let usable = tail.len() >= 2 && values.iter().all(|&v| v > 0.0 && v.is_finite());
    if !usable {
        let plateau = Plateau {
            median: if values.is_empty() {
                f64::NAN
            } else {
                median(&values)
            },
            bracket: f64::NAN,
            trend_slope: f64::NAN,
        };
        return (plateau, Verdict::Inconclusive);
    }
    let (lo, hi) = min_max(&values);
    let xs: Vec<f64> = tail.iter().map(|&(l, _)| l.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, _, _) = least_squares(&xs, &ys);
    let plateau = Plateau {
        median: median(&values),
        bracket: hi / lo,
        trend_slope: slope,
    };
    let verdict = if slope > gate.slope {
        Verdict::Diverging
    } else if slope < -gate.slope || plateau.bracket >= gate.factor {
        Verdict::Inconclusive
    } else {
        Verdict::Bounded
    };
    (plateau, verdict)
}

/// Both sides of one inequality over a grid of `L`, with the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    /// The `L`-independent side.
    pub lhs: f64,
    /// The `L`-dependent side.
    pub rhs_series: Vec<(f64, f64)>,
    pub orientation: Orientation,
    pub ratio_series: Vec<(f64, f64)>,
    pub plateau: Plateau,
    pub gate: PlateauGate,
    pub verdict: Verdict,
    /// Free-form key/value facts about how the report was produced.
    pub metadata: Vec<(String, String)>,
}

impl InequalityReport {
    pub fn new(
        theorem_id: TheoremId,
        lhs: f64,
        rhs_series: Vec<(f64, f64)>,
        orientation: Orientation,
        gate: PlateauGate,
        metadata: Vec<(String, String)>,
    ) -> Self {
        let ratio_series: Vec<(f64, f64)> = rhs_series
            .iter()
            .map(|&(l, r)| match orientation {
                Orientation::FixedOverSeries => (l, lhs / r),
                Orientation::SeriesOverFixed => (l, r / lhs),
            })
            .collect();
        let (plateau, verdict) = classify(&ratio_series, &gate);
        Self {
            theorem_id,
            lhs,
            rhs_series,
            orientation,
            ratio_series,
            plateau,
            gate,
            verdict,
            metadata,
        }
    }

    /// `THEOREM=<id> VERDICT=<v> MEDIAN_RATIO=<r> BRACKET=<max/min>`.
    pub fn verdict_line(&self) -> String {
        format!(
            "THEOREM={} VERDICT={} MEDIAN_RATIO={:.6e} BRACKET={:.6e}",
            self.theorem_id, self.verdict, self.plateau.median, self.plateau.bracket
        )
    }

    fn local_slopes(&self) -> Vec<f64> {
        let r = &self.ratio_series;
        let diffs: Vec<f64> = (1..r.len())
            .map(|i| (r[i].1 / r[i - 1].1).ln() / (r[i].0 / r[i - 1].0).ln())
            .collect();
        match diffs.first() {
            Some(&d) => std::iter::once(d).chain(diffs).collect(),
            None => vec![f64::NAN; r.len()],
        }
    }

    /// Columns `L,lhs,rhs,ratio,local_slope`; the slope is that of
    /// `ln ratio` against `ln L`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {}", self.verdict_line())?;
        writeln!(out, "L,lhs,rhs,ratio,local_slope")?;
        for (((l, rhs), (_, ratio)), slope) in self
            .rhs_series
            .iter()
            .zip(&self.ratio_series)
            .zip(self.local_slopes())
        {
            writeln!(
                out,
                "{l:.16e},{:.16e},{rhs:.16e},{ratio:.16e},{slope:.16e}",
                self.lhs
            )?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let relation = match self.orientation {
            Orientation::FixedOverSeries => "lhs <= C * rhs(L); ratio = lhs / rhs(L)",
            Orientation::SeriesOverFixed => "rhs(L) <= C * lhs; ratio = rhs(L) / lhs",
        };
        let mut s = format!(
            "theorem      {}\nrelation     {relation}\nlhs          {:.10e}\nverdict      {}\nmedian ratio {:.6e}\nbracket      {:.6e} (gate < {})\ntrend slope  {:+.4} (gate ±{})\n",
            self.theorem_id,
            self.lhs,
            self.verdict,
            self.plateau.median,
            self.plateau.bracket,
            self.gate.factor,
            self.plateau.trend_slope,
            self.gate.slope,
        );
        for (k, v) in &self.metadata {
            s.push_str(&format!("{k:<12} {v}\n"));
        }
        s.push_str("\n           L          rhs(L)           ratio\n");
        for ((l, r), (_, q)) in self.rhs_series.iter().zip(&self.ratio_series) {
            s.push_str(&format!("{l:>12.4} {r:>15.6e} {q:>15.6e}\n"));
        }
        s.push_str(&self.verdict_line());
        s.push('\n');
        s
    }
}
