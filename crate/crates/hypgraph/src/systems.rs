//! The concrete skew-product systems T(xi, x) = (tau(xi), T_xi(x)): affine
//! Anosov forcing on the torus, the affine horseshoe family, and the
//! baker-driven Weierstrass graphs, together with their hyperbolicity
//! constants, hypothesis checks, and geometric potentials.

use crate::error::{Error, Result};
use crate::symbolic::{Potential, ShiftSpace};
use serde::{Deserialize, Serialize};

/// Unstable eigenvalue of the torus automorphism (2 1; 1 1).
pub fn cat_kappa() -> f64 {
    (3.0 + 5.0f64.sqrt()) / 2.0
}

/// The chain 0 < mu_s <= mu_w < 1 < lambda_w <= lambda_s < kappa_w <= kappa_s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityConstants {
    pub mu_s: f64,
    pub mu_w: f64,
    pub lambda_w: f64,
    pub lambda_s: f64,
    pub kappa_w: f64,
    pub kappa_s: f64,
}

impl HyperbolicityConstants {
    /// All rates equal within each pair, as for affine systems.
    pub fn affine(mu: f64, lambda: f64, kappa: f64) -> Self {
        HyperbolicityConstants {
            mu_s: mu,
            mu_w: mu,
            lambda_w: lambda,
            lambda_s: lambda,
            kappa_w: kappa,
            kappa_s: kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self;
        let checks: [(&str, bool); 7] = [
            ("0 < mu_s", 0.0 < c.mu_s),
            ("mu_s <= mu_w", c.mu_s <= c.mu_w),
            ("mu_w < 1", c.mu_w < 1.0),
            ("1 < lambda_w", 1.0 < c.lambda_w),
            ("lambda_w <= lambda_s", c.lambda_w <= c.lambda_s),
            ("lambda_s < kappa_w", c.lambda_s < c.kappa_w),
            ("kappa_w <= kappa_s", c.kappa_w <= c.kappa_s),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameters(format!(
                    "hyperbolicity chain violated at `{name}`"
                )));
            }
        }
        Ok(())
    }

    /// Critical Holder exponent log lambda_s / log kappa_w.
    pub fn critical_exponent(&self) -> f64 {
        self.lambda_s.ln() / self.kappa_w.ln()
    }
}

/// One term of a trigonometric forcing sum: `coef * f(2 pi m x) * g(2 pi n y)`
/// where f, g in {sin, cos} per the basis tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingTerm {
    pub coef: f64,
    /// Two-letter tag, one letter per factor: "ss", "sc", "cs", or "cc".
    pub basis: BasisTag,
    pub m: i32,
    pub n: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTag {
    #[serde(rename = "ss")]
    SinSin,
    #[serde(rename = "sc")]
    SinCos,
    #[serde(rename = "cs")]
    CosSin,
    #[serde(rename = "cc")]
    CosCos,
}

impl ForcingTerm {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let (fx, fy) = match self.basis {
            BasisTag::SinSin => ((tau * self.m as f64 * x).sin(), (tau * self.n as f64 * y).sin()),
            BasisTag::SinCos => ((tau * self.m as f64 * x).sin(), (tau * self.n as f64 * y).cos()),
            BasisTag::CosSin => ((tau * self.m as f64 * x).cos(), (tau * self.n as f64 * y).sin()),
            BasisTag::CosCos => ((tau * self.m as f64 * x).cos(), (tau * self.n as f64 * y).cos()),
        };
        self.coef * fx * fy
    }

    /// Bound on |d term / d(x,y)| in sup norm.
    fn gradient_bound(&self) -> f64 {
        let tau = std::f64::consts::TAU;
        self.coef.abs() * tau * (self.m.abs().max(self.n.abs()) as f64)
    }
}

/// Finite Fourier forcing p(x, y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forcing(pub Vec<ForcingTerm>);

impl Forcing {
    /// The forcing used for the reference pictures:
    /// sin(2 pi x) sin(2 pi y) + cos(4 pi y).
    pub fn reference() -> Self {
        Forcing(vec![
            ForcingTerm {
                coef: 1.0,
                basis: BasisTag::SinSin,
                m: 1,
                n: 1,
            },
            ForcingTerm {
                coef: 1.0,
                basis: BasisTag::CosCos,
                m: 0,
                n: 2,
            },
        ])
    }

    pub fn zero() -> Self {
        Forcing(Vec::new())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.0.iter().map(|t| t.eval(x, y)).sum()
    }

    pub fn sup_bound(&self) -> f64 {
        self.0.iter().map(|t| t.coef.abs()).sum()
    }

    pub fn gradient_bound(&self) -> f64 {
        self.0.iter().map(|t| t.gradient_bound()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty() || self.0.iter().all(|t| t.coef == 0.0)
    }
}

/// Fiber contraction of the stored Kaplan-Yorke form is 1/lambda; the
/// expanding convention (the inverse system, to which the dimension theory
/// applies) has fiber expansion lambda. Potentials below follow the
/// expanding convention.
#[derive(Debug, Clone, PartialEq)]
pub struct AnosovSystem {
    pub lambda: f64,
    pub forcing: Forcing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorseshoeSystem {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub t: f64,
}

impl HorseshoeSystem {
    /// Full fiber range of the invariant set: [0, t/(lambda-1)] for t >= 0.
    pub fn fiber_range(&self) -> f64 {
        (self.t / (self.lambda - 1.0)).abs()
    }

    /// Overlap of the fiber projections exists exactly for lambda in (1,2),
    /// t != 0.
    pub fn blender_regime(&self) -> bool {
        self.t != 0.0 && self.lambda > 1.0 && self.lambda < 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BakerSystem {
    pub lambda: f64,
    pub b: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SkewSystem {
    AffineAnosov(AnosovSystem),
    AffineHorseshoe(HorseshoeSystem),
    BakerWeierstrass(BakerSystem),
}

impl SkewSystem {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SkewSystem::AffineAnosov(_) => "affine_anosov",
            SkewSystem::AffineHorseshoe(_) => "affine_horseshoe",
            SkewSystem::BakerWeierstrass(_) => "baker_weierstrass",
        }
    }

    pub fn constants(&self) -> HyperbolicityConstants {
        match self {
            SkewSystem::AffineAnosov(s) => {
                let kappa = cat_kappa();
                HyperbolicityConstants {
                    mu_s: 1.0 / kappa,
                    mu_w: 1.0 / kappa,
                    lambda_w: s.lambda,
                    lambda_s: s.lambda,
                    kappa_w: kappa,
                    kappa_s: kappa,
                }
            }
            SkewSystem::AffineHorseshoe(s) => {
                HyperbolicityConstants::affine(s.mu, s.lambda, s.kappa)
            }
            SkewSystem::BakerWeierstrass(s) => {
                HyperbolicityConstants::affine(1.0 / s.b as f64, s.lambda, s.b as f64)
            }
        }
    }

    /// Symbolic coding of the base dynamics restricted to unstable slices.
    /// The Anosov base is a proxy full shift carrying the known base entropy
    /// (no Markov partition of the torus is constructed).
    pub fn base_shift(&self) -> ShiftSpace {
        match self {
            SkewSystem::AffineAnosov(_) => {
                ShiftSpace::full(2).with_entropy_override(cat_kappa().ln())
            }
            SkewSystem::AffineHorseshoe(_) => ShiftSpace::full(2),
            SkewSystem::BakerWeierstrass(s) => ShiftSpace::full(s.b as usize),
        }
    }
}

/// The three geometric potentials, all depth 0 for the affine example
/// systems.
#[derive(Debug, Clone)]
pub struct GeometricPotentials {
    pub phi_s: Potential,
    pub phi_u: Potential,
    pub phi_cu: Potential,
}

/// phi_s = log(stable contraction), phi_u = -log(unstable expansion),
/// phi_cu = -log(fiber expansion along the graph).
pub fn geometric_potentials(sys: &SkewSystem) -> GeometricPotentials {
    let n = sys.base_shift().alphabet();
    let c = sys.constants();
    GeometricPotentials {
        phi_s: Potential::constant(n, c.mu_w.ln()),
        phi_u: Potential::constant(n, -c.kappa_w.ln()),
        phi_cu: Potential::constant(n, -c.lambda_w.ln()),
    }
}

/// One evaluated hypothesis inequality with its margin.
#[derive(Debug, Clone)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub standing_ok: bool,
    pub pinching_ok: bool,
    pub checks: Vec<InequalityCheck>,
}

/// Evaluate the standing chain and the pinching inequality
/// kappa_s * mu_w <= lambda_w with margins.
pub fn validate_hypotheses(sys: &SkewSystem) -> HypothesisReport {
    let c = sys.constants();
    let standing_ok = c.validate().is_ok();
    let pinch_lhs = c.kappa_s * c.mu_w;
    let pinching_ok = pinch_lhs <= c.lambda_w;
    let checks = vec![
        InequalityCheck {
            name: "mu_w < 1",
            lhs: c.mu_w,
            rhs: 1.0,
            ok: c.mu_w < 1.0,
        },
        InequalityCheck {
            name: "1 < lambda_w",
            lhs: 1.0,
            rhs: c.lambda_w,
            ok: 1.0 < c.lambda_w,
        },
        InequalityCheck {
            name: "lambda_s < kappa_w",
            lhs: c.lambda_s,
            rhs: c.kappa_w,
            ok: c.lambda_s < c.kappa_w,
        },
        InequalityCheck {
            name: "kappa_s * mu_w <= lambda_w",
            lhs: pinch_lhs,
            rhs: c.lambda_w,
            ok: pinching_ok,
        },
    ];
    HypothesisReport {
        standing_ok,
        pinching_ok,
        checks,
    }
}

// ---------------------------------------------------------------------------
// Declarative configuration

/// Top-level config file: a `[system]` table plus optional run options.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfigFile {
    pub system: SystemConfig,
    #[serde(default)]
    pub run: RunOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SystemConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    /// Fourier forcing terms as [coef, basis, m, n] records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<ForcingTermConfig>>,
}

/// A forcing term in config form: `[coef, "ss", m, n]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ForcingTermConfig(pub f64, pub String, pub i32, pub i32);

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RunOptions {
    pub seed: u64,
    pub max_words: u64,
    pub max_points: u64,
    pub max_depth: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 1,
            max_words: 1 << 26,
            max_points: 1 << 24,
            max_depth: 64,
        }
    }
}

impl RunOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_words == 0 || self.max_points == 0 || self.max_depth == 0 {
            return Err(Error::Config("budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Parse a TOML config; parse errors carry the line and field reported by
/// the TOML parser.
pub fn parse_config(text: &str) -> Result<RunConfigFile> {
    let parsed: RunConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    parsed.run.validate()?;
    Ok(parsed)
}

pub fn serialize_config(cfg: &RunConfigFile) -> String {
    toml::to_string(cfg).expect("config serialization cannot fail")
}

/// Build a validated system from a parsed config, naming the violated
/// inequality on failure.
pub fn build_system(cfg: &SystemConfig) -> Result<SkewSystem> {
    let need = |field: &str, v: Option<f64>| -> Result<f64> {
        v.ok_or_else(|| Error::InvalidParameters(format!("missing field `{field}`")))
    };
    match cfg.kind.as_str() {
        "affine_anosov" => {
            let lambda = need("lambda", cfg.lambda)?;
            let kappa = cat_kappa();
            if !(lambda > 1.0 && lambda < kappa) {
                return Err(Error::InvalidParameters(format!(
                    "affine_anosov requires 1 < lambda < kappa = {kappa:.6}, got lambda = {lambda}"
                )));
            }
            let forcing = match &cfg.p {
                None => Forcing::reference(),
                Some(terms) => parse_forcing(terms)?,
            };
            let sys = SkewSystem::AffineAnosov(AnosovSystem { lambda, forcing });
            sys.constants().validate()?;
            Ok(sys)
        }
        "affine_horseshoe" => {
            let mu = need("mu", cfg.mu)?;
            let lambda = need("lambda", cfg.lambda)?;
            let kappa = need("kappa", cfg.kappa)?;
            let t = cfg.t.unwrap_or(0.0);
            if !(mu > 0.0 && mu < 0.5) {
                return Err(Error::InvalidParameters(format!(
                    "affine_horseshoe requires 0 < mu < 1/2, got mu = {mu}"
                )));
            }
            if !(lambda > 1.0) {
                return Err(Error::InvalidParameters(format!(
                    "affine_horseshoe requires lambda > 1, got lambda = {lambda}"
                )));
            }
            if !(kappa > 2.0) {
                return Err(Error::InvalidParameters(format!(
                    "affine_horseshoe requires kappa > 2, got kappa = {kappa}"
                )));
            }
            if !(lambda < kappa) {
                return Err(Error::InvalidParameters(format!(
                    "affine_horseshoe requires lambda < kappa, got lambda = {lambda}, kappa = {kappa}"
                )));
            }
            let sys = SkewSystem::AffineHorseshoe(HorseshoeSystem {
                mu,
                lambda,
                kappa,
                t,
            });
            sys.constants().validate()?;
            Ok(sys)
        }
        "baker_weierstrass" => {
            let lambda = need("lambda", cfg.lambda)?;
            let b = cfg
                .b
                .ok_or_else(|| Error::InvalidParameters("missing field `b`".into()))?;
            if b < 2 {
                return Err(Error::InvalidParameters(format!(
                    "baker_weierstrass requires integer b >= 2, got b = {b}"
                )));
            }
            if !(lambda > 1.0 && lambda < b as f64) {
                return Err(Error::InvalidParameters(format!(
                    "baker_weierstrass requires 1 < lambda < b, got lambda = {lambda}, b = {b}"
                )));
            }
            let sys = SkewSystem::BakerWeierstrass(BakerSystem { lambda, b });
            sys.constants().validate()?;
            Ok(sys)
        }
        other => Err(Error::InvalidParameters(format!(
            "unknown system kind `{other}`"
        ))),
    }
}

fn parse_forcing(terms: &[ForcingTermConfig]) -> Result<Forcing> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let basis = match t.1.as_str() {
            "ss" => BasisTag::SinSin,
            "sc" => BasisTag::SinCos,
            "cs" => BasisTag::CosSin,
            "cc" => BasisTag::CosCos,
            other => {
                return Err(Error::InvalidParameters(format!(
                    "forcing basis tag must be ss/sc/cs/cc, got `{other}`"
                )))
            }
        };
        out.push(ForcingTerm {
            coef: t.0,
            basis,
            m: t.2,
            n: t.3,
        });
    }
    Ok(Forcing(out))
}

/// Config record for a built system, for round-trips and output headers.
pub fn system_to_config(sys: &SkewSystem) -> SystemConfig {
    match sys {
        SkewSystem::AffineAnosov(s) => SystemConfig {
            kind: "affine_anosov".into(),
            mu: None,
            lambda: Some(s.lambda),
            kappa: None,
            t: None,
            b: None,
            p: Some(
                s.forcing
                    .0
                    .iter()
                    .map(|t| {
                        let tag = match t.basis {
                            BasisTag::SinSin => "ss",
                            BasisTag::SinCos => "sc",
                            BasisTag::CosSin => "cs",
                            BasisTag::CosCos => "cc",
                        };
                        ForcingTermConfig(t.coef, tag.into(), t.m, t.n)
                    })
                    .collect(),
            ),
        },
        SkewSystem::AffineHorseshoe(s) => SystemConfig {
            kind: "affine_horseshoe".into(),
            mu: Some(s.mu),
            lambda: Some(s.lambda),
            kappa: Some(s.kappa),
            t: Some(s.t),
            b: None,
            p: None,
        },
        SkewSystem::BakerWeierstrass(s) => SystemConfig {
            kind: "baker_weierstrass".into(),
            mu: None,
            lambda: Some(s.lambda),
            kappa: None,
            t: None,
            b: Some(s.b),
            p: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn horseshoe(mu: f64, lambda: f64, kappa: f64, t: f64) -> SkewSystem {
        build_system(&SystemConfig {
            kind: "affine_horseshoe".into(),
            mu: Some(mu),
            lambda: Some(lambda),
            kappa: Some(kappa),
            t: Some(t),
            b: None,
            p: None,
        })
        .unwrap()
    }

    #[test]
    fn anosov_constants() {
        let cfg = SystemConfig {
            kind: "affine_anosov".into(),
            mu: None,
            lambda: Some(1.5),
            kappa: None,
            t: None,
            b: None,
            p: None,
        };
        let sys = build_system(&cfg).unwrap();
        let c = sys.constants();
        let kappa = (3.0 + 5.0f64.sqrt()) / 2.0;
        assert!((c.kappa_s - kappa).abs() < 1e-14);
        assert!((c.kappa_w - kappa).abs() < 1e-14);
        assert!((c.mu_w - 1.0 / kappa).abs() < 1e-14);
        // Default forcing at (0, 0): sin*sin = 0, cos(0) = 1.
        if let SkewSystem::AffineAnosov(s) = &sys {
            assert!((s.forcing.eval(0.0, 0.0) - 1.0).abs() < 1e-15);
        } else {
            panic!("wrong kind");
        }
    }

    #[test]
    fn horseshoe_blender_flag() {
        let sys = horseshoe(0.25, 1.5, 4.0, 0.5);
        if let SkewSystem::AffineHorseshoe(h) = &sys {
            assert!(h.blender_regime());
            assert!((h.fiber_range() - 1.0).abs() < 1e-15);
        } else {
            panic!("wrong kind");
        }
        if let SkewSystem::AffineHorseshoe(h) = horseshoe(0.25, 2.5, 4.0, 0.5) {
            assert!(!h.blender_regime());
        }
    }

    #[test]
    fn baker_invalid_parameters() {
        let cfg = SystemConfig {
            kind: "baker_weierstrass".into(),
            mu: None,
            lambda: Some(3.0),
            kappa: None,
            t: None,
            b: Some(2),
            p: None,
        };
        let err = build_system(&cfg).unwrap_err();
        assert!(err.to_string().contains("lambda < b"), "{err}");
    }

    #[test]
    fn pinching_checks() {
        // Anosov: kappa * mu = 1 <= lambda automatically.
        let anosov = build_system(&SystemConfig {
            kind: "affine_anosov".into(),
            mu: None,
            lambda: Some(1.5),
            kappa: None,
            t: None,
            b: None,
            p: None,
        })
        .unwrap();
        assert!(validate_hypotheses(&anosov).pinching_ok);

        // 4 * 0.25 = 1 <= 1.5.
        let rep = validate_hypotheses(&horseshoe(0.25, 1.5, 4.0, 0.5));
        assert!(rep.standing_ok && rep.pinching_ok);

        // 4 * 0.45 = 1.8 > 1.5.
        let rep = validate_hypotheses(&horseshoe(0.45, 1.5, 4.0, 0.5));
        assert!(rep.standing_ok);
        assert!(!rep.pinching_ok);
        let pinch = rep
            .checks
            .iter()
            .find(|c| c.name.contains("kappa_s"))
            .unwrap();
        assert!((pinch.lhs - 1.8).abs() < 1e-12);
    }

    #[test]
    fn potentials_of_examples() {
        let hs = horseshoe(0.25, 1.5, 4.0, 0.5);
        let p = geometric_potentials(&hs);
        assert!((p.phi_s.values()[0] - 0.25f64.ln()).abs() < 1e-14);
        assert!((p.phi_u.values()[0] + 4.0f64.ln()).abs() < 1e-14);
        assert!((p.phi_cu.values()[0] + 1.5f64.ln()).abs() < 1e-14);
        assert!(p.phi_u.is_strictly_negative() && p.phi_cu.is_strictly_negative());
        assert!(p.phi_s.is_strictly_negative());

        let anosov = build_system(&SystemConfig {
            kind: "affine_anosov".into(),
            mu: None,
            lambda: Some(1.5),
            kappa: None,
            t: None,
            b: None,
            p: None,
        })
        .unwrap();
        let p = geometric_potentials(&anosov);
        let kappa = cat_kappa();
        assert!((p.phi_s.values()[0] + kappa.ln()).abs() < 1e-14);
        assert!((p.phi_u.values()[0] + kappa.ln()).abs() < 1e-14);
        assert!((p.phi_cu.values()[0] + 1.5f64.ln()).abs() < 1e-14);

        let baker = build_system(&SystemConfig {
            kind: "baker_weierstrass".into(),
            mu: None,
            lambda: Some(1.5),
            kappa: None,
            t: None,
            b: Some(3),
            p: None,
        })
        .unwrap();
        let p = geometric_potentials(&baker);
        assert!((p.phi_u.values()[0] + 3.0f64.ln()).abs() < 1e-14);
        assert!((p.phi_cu.values()[0] + 1.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn cat_matrix_facts() {
        // det = 1, trace = 3, eigenvalues multiply to 1.
        let kappa = cat_kappa();
        let mu = 1.0 / kappa;
        assert!((kappa * mu - 1.0).abs() < 1e-15);
        assert!((kappa + mu - 3.0).abs() < 1e-12);
        // (2 1; 1 1) applied to the kappa-eigenvector scales by kappa.
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let v = (phi, 1.0);
        let av = (2.0 * v.0 + v.1, v.0 + v.1);
        assert!((av.0 - kappa * v.0).abs() < 1e-12);
        assert!((av.1 - kappa * v.1).abs() < 1e-12);
    }

    #[test]
    fn config_roundtrip() {
        let text = r#"
[system]
kind = "affine_horseshoe"
mu = 0.25
lambda = 1.5
kappa = 4.0
t = 0.5
"#;
        let cfg = parse_config(text).unwrap();
        let sys = build_system(&cfg.system).unwrap();
        let back = system_to_config(&sys);
        let sys2 = build_system(&back).unwrap();
        assert_eq!(sys, sys2);
        // Full serialize -> parse -> build roundtrip.
        let text2 = serialize_config(&RunConfigFile {
            system: back,
            run: cfg.run.clone(),
        });
        let cfg2 = parse_config(&text2).unwrap();
        assert_eq!(build_system(&cfg2.system).unwrap(), sys);
    }

    #[test]
    fn config_error_names_field() {
        let text = r#"
[system]
kind = "affine_horseshoe"
mu = 0.25
lambda = "not a number"
kappa = 4.0
"#;
        let err = parse_config(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lambda") || msg.contains("line"), "{msg}");
    }

    #[test]
    fn forcing_roundtrip_through_toml() {
        let text = r#"
[system]
kind = "affine_anosov"
lambda = 1.5
p = [[1.0, "ss", 1, 1], [1.0, "cc", 0, 2]]
"#;
        let cfg = parse_config(text).unwrap();
        let sys = build_system(&cfg.system).unwrap();
        if let SkewSystem::AffineAnosov(s) = sys {
            assert_eq!(s.forcing, Forcing::reference());
        } else {
            panic!("wrong kind");
        }
    }
}
