use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One dot-product kernel family with its parameters.
///
/// Text form is `family[:key=value,...]`, e.g. `ntk:L=3,bias=0,norm=1`,
/// `laplace:c=1`, `genexp:c=1,g=0.75`, `series:b=0.5/0.25/0.25`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum KernelSpec {
    /// `κ0(u) = 1 - arccos(u)/π`, the step-activation kernel.
    ArcCos0,
    /// `κ1(u) = (u (π - arccos u) + √(1 - u²)) / π`, the ReLU kernel.
    ArcCos1,
    /// `κ1 ∘ ... ∘ κ1` (depth - 1 times): random-feature kernel of a deep ReLU net.
    DeepRf { depth: usize },
    /// ReLU neural tangent kernel. `bias` adds zero-initialized biases to every
    /// hidden layer; `normalized` divides by `κ(1)`.
    DeepNtk { depth: usize, bias: bool, normalized: bool },
    /// `e^{-c √(1 - u)}`.
    Laplace { c: f64 },
    /// `e^{-c (1 - u)^γ}`.
    GenExp { c: f64, gamma: f64 },
    /// `κ0 ∘ ... ∘ κ0` (depth - 1 times).
    DeepStep { depth: usize },
    /// `e^{-c (1 - u)}`.
    GaussianSphere { c: f64 },
    Linear,
    /// `Σ b_n u^n` with user-supplied coefficients.
    CustomSeries(Vec<f64>),
}

impl KernelSpec {
    pub fn family(&self) -> &'static str {
        match self {
            KernelSpec::ArcCos0 => "arccos0",
            KernelSpec::ArcCos1 => "arccos1",
            KernelSpec::DeepRf { .. } => "rf",
            KernelSpec::DeepNtk { .. } => "ntk",
            KernelSpec::Laplace { .. } => "laplace",
            KernelSpec::GenExp { .. } => "genexp",
            KernelSpec::DeepStep { .. } => "step",
            KernelSpec::GaussianSphere { .. } => "gauss",
            KernelSpec::Linear => "linear",
            KernelSpec::CustomSeries(_) => "series",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            KernelSpec::DeepRf { depth } | KernelSpec::DeepStep { depth } | KernelSpec::DeepNtk { depth, .. } => {
                if *depth < 2 {
                    return bad(format!("{}: depth L must be >= 2, got {depth}", self.family()));
                }
            }
            KernelSpec::Laplace { c } | KernelSpec::GaussianSphere { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return bad(format!("{}: c must be positive, got {c}", self.family()));
                }
            }
            KernelSpec::GenExp { c, gamma } => {
                if !(c.is_finite() && *c > 0.0) {
                    return bad(format!("genexp: c must be positive, got {c}"));
                }
                if !(gamma.is_finite() && *gamma > 0.0 && *gamma < 2.0) || *gamma == 1.0 {
                    return bad(format!("genexp: exponent must lie in (0, 1) or (1, 2), got {gamma}"));
                }
            }
            KernelSpec::CustomSeries(b) => {
                if b.is_empty() || b.iter().any(|x| !x.is_finite()) {
                    return bad("series: coefficients must be finite and nonempty".into());
                }
            }
            KernelSpec::ArcCos0 | KernelSpec::ArcCos1 | KernelSpec::Linear => {}
        }
        Ok(())
    }

    /// `κ(1)`.
    pub fn value_at_one(&self) -> f64 {
        match self {
            KernelSpec::DeepNtk { depth, bias, normalized } => {
                if *normalized {
                    1.0
                } else {
                    ntk_value_at_one(*depth, *bias)
                }
            }
            KernelSpec::CustomSeries(b) => b.iter().sum(),
            _ => 1.0,
        }
    }

    /// Families with a convergent power series on [-1, 1] that this crate can build.
    pub fn is_series_capable(&self) -> bool {
        !matches!(self, KernelSpec::Laplace { .. } | KernelSpec::GenExp { .. })
    }

    /// Infinitely differentiable on the closed interval.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            KernelSpec::GaussianSphere { .. } | KernelSpec::Linear | KernelSpec::CustomSeries(_)
        )
    }
}

/// Unnormalized `κ_NTK(1)`: `L` without biases, `2L - 1` with one bias per hidden layer.
pub(crate) fn ntk_value_at_one(depth: usize, bias: bool) -> f64 {
    if bias {
        (2 * depth - 1) as f64
    } else {
        depth as f64
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::ArcCos0 | KernelSpec::ArcCos1 | KernelSpec::Linear => write!(f, "{}", self.family()),
            KernelSpec::DeepRf { depth } | KernelSpec::DeepStep { depth } => {
                write!(f, "{}:L={depth}", self.family())
            }
            KernelSpec::DeepNtk { depth, bias, normalized } => {
                write!(f, "ntk:L={depth},bias={},norm={}", u8::from(*bias), u8::from(*normalized))
            }
            KernelSpec::Laplace { c } | KernelSpec::GaussianSphere { c } => write!(f, "{}:c={c}", self.family()),
            KernelSpec::GenExp { c, gamma } => write!(f, "genexp:c={c},g={gamma}"),
            KernelSpec::CustomSeries(b) => {
                let parts: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                write!(f, "series:b={}", parts.join("/"))
            }
        }
    }
}

struct Params<'a> {
    family: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn parse(family: &'a str, body: Option<&'a str>) -> Result<Self> {
        let mut pairs = Vec::new();
        if let Some(body) = body.filter(|b| !b.trim().is_empty()) {
            for item in body.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParameter(format!("{family}: expected key=value, got `{item}`")))?;
                pairs.push((k.trim(), v.trim()));
            }
        }
        Ok(Params { family, pairs })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(Error::InvalidParameter(format!("{}: unknown parameter `{k}`", self.family)));
            }
        }
        Ok(())
    }

    fn raw(&self, keys: &[&str]) -> Option<&'a str> {
        self.pairs.iter().rev().find(|(k, _)| keys.contains(k)).map(|(_, v)| *v)
    }

    fn float(&self, keys: &[&str], default: Option<f64>) -> Result<f64> {
        match self.raw(keys) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("{}: `{}` is not a number: {v}", self.family, keys[0]))),
            None => default.ok_or_else(|| Error::InvalidParameter(format!("{}: missing `{}`", self.family, keys[0]))),
        }
    }

    fn depth(&self) -> Result<usize> {
        let v = self
            .raw(&["L", "depth"])
            .ok_or_else(|| Error::InvalidParameter(format!("{}: missing depth `L`", self.family)))?;
        v.parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("{}: depth must be an integer, got {v}", self.family)))
    }

    fn flag(&self, keys: &[&str], default: bool) -> Result<bool> {
        match self.raw(keys) {
            None => Ok(default),
            Some("1") | Some("true") => Ok(true),
            Some("0") | Some("false") => Ok(false),
            Some(v) => Err(Error::InvalidParameter(format!("{}: `{}` must be 0 or 1, got {v}", self.family, keys[0]))),
        }
    }
}

impl From<KernelSpec> for String {
    fn from(spec: KernelSpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for KernelSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<KernelSpec> {
        s.parse()
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, body) = match s.split_once(':') {
            Some((f, b)) => (f.trim(), Some(b)),
            None => (s, None),
        };
        let p = Params::parse(family, body)?;
        let spec = match family.to_ascii_lowercase().as_str() {
            "arccos0" | "kappa0" => {
                p.check_keys(&[])?;
                KernelSpec::ArcCos0
            }
            "arccos1" | "kappa1" => {
                p.check_keys(&[])?;
                KernelSpec::ArcCos1
            }
            "linear" => {
                p.check_keys(&[])?;
                KernelSpec::Linear
            }
            "rf" => {
                p.check_keys(&["L", "depth"])?;
                KernelSpec::DeepRf { depth: p.depth()? }
            }
            "step" => {
                p.check_keys(&["L", "depth"])?;
                KernelSpec::DeepStep { depth: p.depth()? }
            }
            "ntk" => {
                p.check_keys(&["L", "depth", "bias", "norm"])?;
                KernelSpec::DeepNtk {
                    depth: p.depth()?,
                    bias: p.flag(&["bias"], false)?,
                    normalized: p.flag(&["norm"], true)?,
                }
            }
            "laplace" => {
                p.check_keys(&["c"])?;
                KernelSpec::Laplace { c: p.float(&["c"], Some(1.0))? }
            }
            "gauss" | "gaussian" => {
                p.check_keys(&["c"])?;
                KernelSpec::GaussianSphere { c: p.float(&["c"], Some(1.0))? }
            }
            "genexp" => {
                p.check_keys(&["c", "g", "gamma"])?;
                KernelSpec::GenExp {
                    c: p.float(&["c"], Some(1.0))?,
                    gamma: p.float(&["g", "gamma"], None)?,
                }
            }
            "series" => {
                p.check_keys(&["b"])?;
                let raw = p.raw(&["b"]).ok_or_else(|| Error::InvalidParameter("series: missing `b`".into()))?;
                let coeffs = raw
                    .split('/')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::InvalidParameter(format!("series: bad coefficient `{x}`")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                KernelSpec::CustomSeries(coeffs)
            }
            _ => return Err(Error::UnknownKernel(s.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_forms() {
        assert_eq!(
            "ntk:L=3,bias=0,norm=1".parse::<KernelSpec>().unwrap(),
            KernelSpec::DeepNtk { depth: 3, bias: false, normalized: true }
        );
        assert_eq!("rf:L=4".parse::<KernelSpec>().unwrap(), KernelSpec::DeepRf { depth: 4 });
        assert_eq!(
            "genexp:c=1,g=0.75".parse::<KernelSpec>().unwrap(),
            KernelSpec::GenExp { c: 1.0, gamma: 0.75 }
        );
        assert_eq!("linear".parse::<KernelSpec>().unwrap(), KernelSpec::Linear);
        assert_eq!("laplace".parse::<KernelSpec>().unwrap(), KernelSpec::Laplace { c: 1.0 });
        assert_eq!(
            "series:b=0.5/0.5".parse::<KernelSpec>().unwrap(),
            KernelSpec::CustomSeries(vec![0.5, 0.5])
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("foo:L=2".parse::<KernelSpec>(), Err(Error::UnknownKernel(_))));
        assert!(matches!("rf".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
        assert!(matches!("rf:L=1".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
        assert!(matches!("rf:L=2,c=3".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
        assert!(matches!("genexp:c=1,g=1".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
        assert!(matches!("genexp:c=1,g=2.5".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
        assert!(matches!("laplace:c=-1".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
        assert!(matches!("ntk:L=2,bias=yes".parse::<KernelSpec>(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn value_at_one() {
        assert_eq!(KernelSpec::DeepNtk { depth: 3, bias: false, normalized: false }.value_at_one(), 3.0);
        assert_eq!(KernelSpec::DeepNtk { depth: 2, bias: true, normalized: false }.value_at_one(), 3.0);
        assert_eq!(KernelSpec::DeepNtk { depth: 5, bias: true, normalized: true }.value_at_one(), 1.0);
        assert_eq!(KernelSpec::DeepRf { depth: 7 }.value_at_one(), 1.0);
    }

    fn arb_spec() -> impl Strategy<Value = KernelSpec> {
        prop_oneof![
            Just(KernelSpec::ArcCos0),
            Just(KernelSpec::ArcCos1),
            Just(KernelSpec::Linear),
            (2usize..9).prop_map(|depth| KernelSpec::DeepRf { depth }),
            (2usize..9).prop_map(|depth| KernelSpec::DeepStep { depth }),
            (2usize..9, any::<bool>(), any::<bool>())
                .prop_map(|(depth, bias, normalized)| KernelSpec::DeepNtk { depth, bias, normalized }),
            (1e-3f64..50.0).prop_map(|c| KernelSpec::Laplace { c }),
            (1e-3f64..50.0).prop_map(|c| KernelSpec::GaussianSphere { c }),
            (1e-3f64..50.0, 0.01f64..0.99).prop_map(|(c, gamma)| KernelSpec::GenExp { c, gamma }),
            prop::collection::vec(0.0f64..1.0, 1..6).prop_map(KernelSpec::CustomSeries),
        ]
    }

    proptest! {
        #[test]
        fn text_form_round_trips(spec in arb_spec()) {
            let text = spec.to_string();
            let back: KernelSpec = text.parse().unwrap();
            prop_assert_eq!(back, spec);
        }
    }
}
