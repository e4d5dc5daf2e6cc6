//! Executable checks of the Plancherel / nearest-point identities and of the
//! Hadamard-product theorem, each reported with a signed slack.
//!
//! Every entry obeys `pass = slack ≥ −tol`. Inequalities report the margin by
//! which they hold; identities report `slack = −deviation`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::crossed::{
    adjoint_coeffs, analyze, compress_diagonal, cond_exp, fourier_coeff, hadamard_coeffs, left_unitary,
    pi_norm, pi_square_star, pi_star_square, psi_embed, psi_embed_unchecked, synthesize, CPElement,
    ConcreteOperator, Space,
};
use crate::error::{Error, Result};
use crate::numerics::{min_eig_hermitian, psd_sqrt, spectral_norm, CMatrix, C64};
use crate::rng::SeededRng;
use crate::stinespring::StinespringSpace;
use crate::system::DynamicalSystem;

/// Slack reported for a check whose computation itself failed.
pub const FAILED_SLACK: f64 = f64::MIN;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub slack: f64,
    pub tol: f64,
    pub context: String,
}

impl CheckEntry {
    /// An inequality holding with margin `slack`.
    pub fn inequality(name: impl Into<String>, slack: f64, tol: f64, context: impl Into<String>) -> Self {
        CheckEntry {
            name: name.into(),
            pass: slack >= -tol,
            slack,
            tol,
            context: context.into(),
        }
    }

    /// An identity holding up to `deviation ≥ 0`.
    pub fn equality(name: impl Into<String>, deviation: f64, tol: f64, context: impl Into<String>) -> Self {
        Self::inequality(name, 0.0 - deviation, tol, context)
    }

    /// Multiply the tolerance by `factor` and re-derive `pass`.
    pub fn rescale(&mut self, factor: f64) {
        self.tol *= factor;
        self.pass = self.slack >= -self.tol;
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        CheckEntry {
            name: name.into(),
            pass: false,
            slack: FAILED_SLACK,
            tol: 0.0,
            context: format!("error: {err}"),
        }
    }

    /// Collapse sampled entries into one carrying the worst slack.
    fn worst_of(name: impl Into<String>, entries: &[CheckEntry]) -> Self {
        let name = name.into();
        let Some((idx, worst)) = entries
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.slack + a.1.tol).total_cmp(&(b.1.slack + b.1.tol)))
        else {
            return CheckEntry::inequality(name, 0.0, 0.0, "no samples");
        };
        CheckEntry {
            name,
            pass: entries.iter().all(|e| e.pass),
            slack: worst.slack,
            tol: worst.tol,
            context: format!("{} samples, worst #{idx}: {}", entries.len(), worst.context),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
    pub seed: u64,
    pub instance: serde_json::Value,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Entries whose name starts with `prefix` (the check family, e.g. `"livshits"`).
    pub fn family<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckEntry> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.name == prefix || e.name.starts_with(&format!("{prefix}[")))
    }
}

/// Tunables of [`run_all`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    /// Multiplies every default tolerance.
    pub tol_scale: f64,
    /// Vector pairs per element pair for the bilinear bound.
    pub samples: usize,
    /// Competitors per (element, support) for the nearest-point check.
    pub competitors: usize,
    /// Arbitrary operators on H⊗ℓ₂(G) used to compare the two forms of π.
    pub pi_samples: usize,
    /// Supports K for the nearest-point check; `None` picks {e} and a random subset.
    pub supports: Option<Vec<Vec<usize>>>,
    /// Seed for all sampling inside the checks. Instances supply it from their own seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tol_scale: 1.0,
            samples: 50,
            competitors: 20,
            pi_samples: 5,
            supports: None,
            seed: 0,
        }
    }
}

fn rel(base: f64, scale: f64, magnitude: f64) -> f64 {
    base * scale * (1.0 + magnitude)
}

/// PSD-order slack of `lower ≤ upper`: min eigenvalue of `upper − lower` and its tolerance.
pub fn psd_order_slack(lower: &CMatrix, upper: &CMatrix, tol_scale: f64) -> Result<(f64, f64)> {
    let diff = upper - lower;
    let slack = min_eig_hermitian(&diff)?;
    Ok((slack, rel(1e-9, tol_scale, spectral_norm(&diff)?)))
}

fn pi_dense(ds: &DynamicalSystem, z: &ConcreteOperator) -> Result<CMatrix> {
    Ok(cond_exp(ds, z)?.value)
}

/// π(X*X) computed from the dense operator versus Σ_g X_g* X_g.
pub fn check_plancherel(x: &CPElement, tol_scale: f64) -> Result<CheckEntry> {
    let ds = x.system();
    let z = synthesize(x);
    let dense = pi_dense(ds, &z.adjoint().compose(&z)?)?;
    let series = pi_star_square(x);
    let delta = dense.frobenius_distance(&series);
    Ok(CheckEntry::equality(
        "plancherel",
        delta,
        rel(1e-9, tol_scale, dense.frobenius_norm()),
        format!("‖π(X*X)‖_F = {:.6e}", dense.frobenius_norm()),
    ))
}

/// Truncation X|_K beats every competitor supported on K in the PSD order.
/// Returns one entry per competitor followed by the closed-form entry
/// π(X̂*X̂) = Σ_{g∉K} X_g* X_g.
pub fn check_nearest_point(
    x: &CPElement,
    support: &[usize],
    competitors: &[CPElement],
    tol_scale: f64,
) -> Result<Vec<CheckEntry>> {
    let ds = x.system();
    if let Some(bad) = support.iter().find(|&&g| g >= ds.order()) {
        return Err(Error::invalid(format!("support element {bad} out of range")));
    }
    if let Some(k) = competitors.iter().position(|y| !y.is_supported_on(support)) {
        return Err(Error::invalid(format!("competitor {k} is not supported on K = {support:?}")));
    }
    let pi_gap = |y: &CPElement| -> Result<CMatrix> {
        let z = synthesize(&x.sub(y)?);
        pi_dense(ds, &z.adjoint().compose(&z)?)
    };
    let truncation = x.restrict(support);
    let best = pi_gap(&truncation)?;
    let mut out = Vec::with_capacity(competitors.len() + 1);
    for (k, y) in competitors.iter().enumerate() {
        let (slack, tol) = psd_order_slack(&best, &pi_gap(y)?, tol_scale)?;
        out.push(CheckEntry::inequality("nearest_point", slack, tol, format!("competitor {k}, K = {support:?}")));
    }
    let d = ds.dim();
    let mut tail = CMatrix::zeros(d, d);
    for g in ds.group().elements().filter(|g| !support.contains(g)) {
        let c = x.coeff(g);
        tail += &(&c.adjoint() * c);
    }
    out.push(CheckEntry::equality(
        "nearest_point_closed_form",
        best.frobenius_distance(&tail),
        rel(1e-9, tol_scale, tail.frobenius_norm()),
        format!("K = {support:?}, ‖X̂‖_π = {:.6e}", spectral_norm(&tail)?.sqrt()),
    ));
    Ok(out)
}

/// ‖X⋆Y‖ ≤ ‖π(XX*)^{1/2}‖·‖π(Y*Y)^{1/2}‖.
pub fn check_livshits(x: &CPElement, y: &CPElement, tol_scale: f64) -> Result<CheckEntry> {
    let (lhs, rhs) = livshits_sides(x, y)?;
    Ok(CheckEntry::inequality(
        "livshits",
        rhs - lhs,
        rel(1e-9, tol_scale, rhs),
        format!("‖X⋆Y‖ = {lhs:.12e}, bound = {rhs:.12e}"),
    ))
}

/// Left and right side of the Livshits bound.
pub fn livshits_sides(x: &CPElement, y: &CPElement) -> Result<(f64, f64)> {
    let lhs = spectral_norm(synthesize(&hadamard_coeffs(x, y)?).matrix())?;
    let rhs = (spectral_norm(&pi_square_star(x))? * spectral_norm(&pi_star_square(y))?).sqrt();
    Ok((lhs, rhs))
}

/// |⟨(X⋆Y)ξ, γ⟩| ≤ ‖π(XX*)^{1/2}γ‖·‖π(Y*Y)^{1/2}ξ‖ for each pair (ξ, γ).
pub fn check_bilinear_bound(
    x: &CPElement,
    y: &CPElement,
    vectors: &[(Vec<C64>, Vec<C64>)],
    tol_scale: f64,
) -> Result<Vec<CheckEntry>> {
    let ds = x.system();
    let dim = Space::HG.dim(ds);
    if let Some(k) = vectors.iter().position(|(xi, gamma)| xi.len() != dim || gamma.len() != dim) {
        return Err(Error::invalid(format!("vector pair {k} does not have dimension {dim}")));
    }
    let product = synthesize(&hadamard_coeffs(x, y)?);
    let q = psd_sqrt(psi_embed_unchecked(ds, &pi_square_star(x)).matrix())?;
    let p = psd_sqrt(psi_embed_unchecked(ds, &pi_star_square(y)).matrix())?;
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(vectors
        .iter()
        .enumerate()
        .map(|(k, (xi, gamma))| {
            let h_xi = product.matrix().apply(xi);
            let lhs = gamma.iter().zip(&h_xi).map(|(g, h)| g.conj() * h).sum::<C64>().norm();
            let rhs = norm(&q.apply(gamma)) * norm(&p.apply(xi));
            CheckEntry::inequality(
                "bilinear_bound",
                rhs - lhs,
                rel(1e-9, tol_scale, rhs),
                format!("pair {k}: |⟨(X⋆Y)ξ,γ⟩| = {lhs:.6e}, bound = {rhs:.6e}"),
            )
        })
        .collect())
}

/// Upper and lower slack of −π(X*X) ≤ X*⋆X ≤ π(X*X), with their tolerances.
pub fn sandwich_slacks(x: &CPElement, tol_scale: f64) -> Result<((f64, f64), (f64, f64))> {
    let ds = x.system();
    let h = synthesize(&hadamard_coeffs(&adjoint_coeffs(x), x)?).into_matrix();
    let pi = psi_embed_unchecked(ds, &pi_star_square(x)).into_matrix();
    let upper = psd_order_slack(&h, &pi, tol_scale)?;
    let lower = psd_order_slack(&(-&pi), &h, tol_scale)?;
    Ok((upper, lower))
}

pub fn check_sandwich(x: &CPElement, tol_scale: f64) -> Result<CheckEntry> {
    let ((upper, tol_u), (lower, tol_l)) = sandwich_slacks(x, tol_scale)?;
    Ok(CheckEntry::inequality(
        "sandwich",
        upper.min(lower),
        tol_u.max(tol_l),
        format!("upper slack {upper:.6e}, lower slack {lower:.6e}"),
    ))
}

fn max_dev(a: &CMatrix, b: &CMatrix) -> (f64, f64) {
    (a.frobenius_distance(b), a.frobenius_norm().max(b.frobenius_norm()))
}

// Collects named entries, turning computation errors into failing entries.
struct Collector {
    entries: Vec<CheckEntry>,
}

impl Collector {
    fn push(&mut self, name: String, result: Result<CheckEntry>) {
        match result {
            Ok(mut e) => {
                e.name = name;
                self.entries.push(e);
            }
            Err(err) => self.entries.push(CheckEntry::failed(name, &err)),
        }
    }

    fn push_many(&mut self, name: String, result: Result<Vec<CheckEntry>>) {
        match result {
            Ok(entries) => {
                let mut e = CheckEntry::worst_of(name.clone(), &entries);
                e.name = name;
                self.entries.push(e);
            }
            Err(err) => self.entries.push(CheckEntry::failed(name, &err)),
        }
    }
}

/// Random competitor supported on `support`: either a small perturbation of the
/// truncation or an unrelated algebra-valued family.
fn random_competitor(x: &CPElement, support: &[usize], rng: &mut SeededRng, k: usize) -> CPElement {
    let ds = x.system();
    let d = ds.dim();
    let coeffs = ds
        .group()
        .elements()
        .map(|g| {
            if !support.contains(&g) {
                return CMatrix::zeros(d, d);
            }
            let noise = ds.random_element(rng);
            if k.is_multiple_of(2) {
                let eps = 10f64.powi(-((k / 2) as i32 % 6) - 1);
                x.coeff(g) + &noise.scale_real(eps)
            } else {
                noise.scale_real(2.0 * rng.uniform())
            }
        })
        .collect();
    CPElement::new_unchecked(Arc::clone(ds), coeffs).expect("shapes match")
}

fn default_supports(n: usize, rng: &mut SeededRng) -> Vec<Vec<usize>> {
    let mut supports = vec![vec![0]];
    if n > 1 {
        let mut k: Vec<usize> = (0..n).filter(|_| rng.uniform() < 0.5).collect();
        if k.is_empty() || k.len() == n {
            k = vec![rng.between(1, n - 1)];
        }
        supports.push(k);
    }
    supports
}

/// Build the dilation space for `ds` and run every check.
pub fn run_all(ds: &Arc<DynamicalSystem>, elements: &[CPElement], config: &CheckConfig) -> Result<CheckReport> {
    let space = StinespringSpace::build(Arc::clone(ds))?;
    run_all_with_space(&space, elements, config)
}

/// Run every check against an explicitly supplied dilation space.
///
/// Entry order is fixed: structural entries, then π-equivalence entries, then
/// per-element entries, per-pair entries and per-triple entries.
pub fn run_all_with_space(space: &StinespringSpace, elements: &[CPElement], config: &CheckConfig) -> Result<CheckReport> {
    let ds = space.system();
    if let Some(k) = elements.iter().position(|x| !Arc::ptr_eq(x.system(), ds)) {
        return Err(Error::invalid(format!("element {k} belongs to a different system")));
    }
    let ts = config.tol_scale;
    let mut rng = SeededRng::new(config.seed);
    let mut c = Collector { entries: Vec::new() };

    // Structure of G, (A, α) and K.
    c.push(
        "group.axioms".into(),
        Ok(match ds.group().validate() {
            Ok(()) => CheckEntry::equality("", 0.0, 0.0, format!("|G| = {}", ds.order())),
            Err(e) => CheckEntry::failed("", &e),
        }),
    );
    match ds.invariants() {
        Ok(measures) => {
            for m in measures {
                c.push(
                    format!("system.{}", m.name),
                    Ok(CheckEntry::equality("", m.worst, m.tol * ts, m.at.clone())),
                );
            }
        }
        Err(e) => c.push("system.invariants".into(), Err(e)),
    }
    for check in space.structural_checks() {
        c.push(
            format!("space.{}", check.name),
            Ok(CheckEntry::equality("", check.residual, 1e-12 * ts, "")),
        );
    }

    // π as block-diagonal compression versus V*ρ(·)V, on arbitrary operators.
    let dim = Space::HG.dim(ds);
    for s in 0..config.pi_samples {
        let z = ConcreteOperator::hg(ds, rng.complex_matrix(dim, dim))?;
        c.push(
            format!("pi_dilation[r{s}]"),
            (|| {
                let dil = space.cond_exp_dilated(&z)?;
                let comp = compress_diagonal(ds, &z)?;
                let (dev, mag) = max_dev(dil.matrix(), comp.matrix());
                Ok(CheckEntry::equality("", dev, rel(1e-10, ts, mag), ""))
            })(),
        );
    }
    let a = ds.random_element(&mut rng);
    c.push(
        "pi_generators".into(),
        (|| {
            let psi = psi_embed(ds, &a)?;
            let mut worst = 0.0f64;
            for g in ds.group().elements() {
                let z = left_unitary(ds, g).compose(&psi)?;
                let expected = if g == 0 { psi.matrix().clone() } else { CMatrix::zeros(dim, dim) };
                worst = worst.max(space.cond_exp_dilated(&z)?.matrix().frobenius_distance(&expected));
                let coeff_route = psi_embed_unchecked(ds, &cond_exp(ds, &z)?.value);
                worst = worst.max(coeff_route.matrix().frobenius_distance(&expected));
            }
            Ok(CheckEntry::equality("", worst, rel(1e-12, ts, psi.matrix().frobenius_norm()), ""))
        })(),
    );

    let synth: Vec<ConcreteOperator> = elements.iter().map(synthesize).collect();

    for (i, x) in elements.iter().enumerate() {
        let worst_membership = x.membership_residuals().into_iter().fold(0.0, f64::max);
        c.push(
            format!("membership[x{i}]"),
            Ok(CheckEntry::equality("", worst_membership, 1e-9 * ts, "worst relative coefficient residual")),
        );
        c.push(format!("plancherel[x{i}]"), check_plancherel(x, ts));
        c.push(
            format!("pi_norm[x{i}]"),
            (|| {
                let via_dilation = spectral_norm(&(space.rho(&synth[i])?.matrix() * space.v()))?;
                let via_series = pi_norm(x);
                let full = spectral_norm(synth[i].matrix())?;
                let dev = (via_dilation - via_series).abs();
                let mut e = CheckEntry::equality("", dev, rel(1e-9, ts, full), format!("‖X‖_π = {via_series:.6e} ≤ ‖X‖ = {full:.6e}"));
                if via_series > full + rel(1e-9, ts, full) {
                    e.pass = false;
                }
                Ok(e)
            })(),
        );
        c.push(format!("sandwich[x{i}]"), check_sandwich(x, ts));

        let supports = config
            .supports
            .clone()
            .unwrap_or_else(|| default_supports(ds.order(), &mut rng));
        for support in &supports {
            let label = support.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            let competitors: Vec<CPElement> = (0..config.competitors)
                .map(|k| random_competitor(x, support, &mut rng, k))
                .collect();
            match check_nearest_point(x, support, &competitors, ts) {
                Ok(mut entries) => {
                    let closed = entries.pop().expect("closed-form entry");
                    let mut worst = CheckEntry::worst_of("", &entries);
                    worst.name = format!("nearest_point[x{i};K={{{label}}}]");
                    c.entries.push(worst);
                    c.push(format!("nearest_point_closed_form[x{i};K={{{label}}}]"), Ok(closed));
                }
                Err(e) => c.push(format!("nearest_point[x{i};K={{{label}}}]"), Err(e)),
            }
            c.push(
                format!("nearest_point_equality[x{i};K={{{label}}}]"),
                check_nearest_point(x, support, &[x.restrict(support)], ts).map(|entries| {
                    let e = &entries[0];
                    CheckEntry::equality("", e.slack.abs(), 1e-10 * ts, e.context.clone())
                }),
            );
        }
    }

    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate() {
            let tag = format!("x{i},x{j}");
            let (zx, zy) = (&synth[i], &synth[j]);
            let dilated = space.hadamard_dilated(zx, zy);
            let coeff = hadamard_coeffs(x, y);

            c.push(
                format!("dilation_consistency[{tag}]"),
                (|| {
                    let a = synthesize(coeff.as_ref().map_err(Clone::clone)?);
                    let (dev, mag) = max_dev(a.matrix(), dilated.as_ref().map_err(Clone::clone)?.matrix());
                    Ok(CheckEntry::equality("", dev, rel(1e-9, ts, mag), ""))
                })(),
            );
            c.push(
                format!("symmetry[{tag}]"),
                (|| {
                    let d = dilated.as_ref().map_err(Clone::clone)?;
                    let other = space.hadamard_dilated(&zy.adjoint(), &zx.adjoint())?;
                    let (dev_d, mag) = max_dev(&d.matrix().adjoint(), other.matrix());
                    let lhs = adjoint_coeffs(coeff.as_ref().map_err(Clone::clone)?);
                    let rhs = hadamard_coeffs(&adjoint_coeffs(y), &adjoint_coeffs(x))?;
                    let dev_c = lhs
                        .coeffs()
                        .iter()
                        .zip(rhs.coeffs())
                        .map(|(p, q)| p.frobenius_distance(q))
                        .fold(0.0, f64::max);
                    Ok(CheckEntry::equality(
                        "",
                        dev_d.max(dev_c),
                        rel(1e-10, ts, mag),
                        format!("dilated {dev_d:.3e}, coefficients {dev_c:.3e}"),
                    ))
                })(),
            );
            let a = ds.random_element(&mut rng);
            c.push(
                format!("bimodularity[{tag}]"),
                (|| {
                    let d = dilated.as_ref().map_err(Clone::clone)?;
                    let psi = psi_embed(ds, &a)?;
                    let right_l = d.compose(&psi)?;
                    let right_r = space.hadamard_dilated(zx, &zy.compose(&psi)?)?;
                    let left_l = psi.compose(d)?;
                    let left_r = space.hadamard_dilated(&psi.compose(zx)?, zy)?;
                    let (dev_r, mag_r) = max_dev(right_l.matrix(), right_r.matrix());
                    let (dev_l, mag_l) = max_dev(left_l.matrix(), left_r.matrix());
                    Ok(CheckEntry::equality(
                        "",
                        dev_r.max(dev_l),
                        rel(1e-10, ts, mag_r.max(mag_l)),
                        format!("right {dev_r:.3e}, left {dev_l:.3e}"),
                    ))
                })(),
            );
            c.push(
                format!("coefficient_identity[{tag}]"),
                (|| {
                    let d = dilated.as_ref().map_err(Clone::clone)?;
                    let mut worst = 0.0f64;
                    let mut mag = 0.0f64;
                    for g in ds.group().elements() {
                        let lhs = fourier_coeff(ds, d, g)?;
                        let rhs = &fourier_coeff(ds, zx, g)? * &fourier_coeff(ds, zy, g)?;
                        worst = worst.max(lhs.frobenius_distance(&rhs));
                        mag = mag.max(rhs.frobenius_norm());
                    }
                    Ok(CheckEntry::equality("", worst, rel(1e-10, ts, mag), ""))
                })(),
            );
            c.push(
                format!("coefficient_sum[{tag}]"),
                (|| {
                    let d = dilated.as_ref().map_err(Clone::clone)?;
                    let xs = analyze(ds, zx)?;
                    let ys = analyze(ds, zy)?;
                    let mut sum = CMatrix::zeros(dim, dim);
                    for g in ds.group().elements() {
                        let term = left_unitary(ds, g)
                            .compose(&psi_embed_unchecked(ds, &(xs.coeff(g) * ys.coeff(g))))?;
                        sum += term.matrix();
                    }
                    let (dev, mag) = max_dev(&sum, d.matrix());
                    Ok(CheckEntry::equality("", dev, rel(1e-10, ts, mag), ""))
                })(),
            );
            c.push(
                format!("contractivity[{tag}]"),
                (|| {
                    let d = dilated.as_ref().map_err(Clone::clone)?;
                    let lhs = spectral_norm(d.matrix())?;
                    let rhs = spectral_norm(zx.matrix())? * spectral_norm(zy.matrix())?;
                    Ok(CheckEntry::inequality("", rhs - lhs, rel(1e-9, ts, rhs), format!("‖X⋆Y‖ = {lhs:.6e}, ‖X‖‖Y‖ = {rhs:.6e}")))
                })(),
            );
            c.push(format!("livshits[{tag}]"), check_livshits(x, y, ts));
            let vectors: Vec<(Vec<C64>, Vec<C64>)> = (0..config.samples)
                .map(|_| (rng.unit_vector(dim), rng.unit_vector(dim)))
                .collect();
            c.push_many(format!("bilinear_bound[{tag}]"), check_bilinear_bound(x, y, &vectors, ts));
            match space.factor_contraction(zx, zy) {
                Ok((_, report)) => {
                    c.push(
                        format!("factorization_contraction[{tag}]"),
                        Ok(CheckEntry::inequality(
                            "",
                            1.0 - report.sigma_max,
                            1e-8 * ts,
                            format!("σ_max(S) = {:.12}", report.sigma_max),
                        )),
                    );
                    c.push(
                        format!("factorization_residual[{tag}]"),
                        Ok(CheckEntry::equality("", report.residual, rel(1e-7, ts, report.product_norm), "")),
                    );
                }
                Err(e) => {
                    c.push(format!("factorization_contraction[{tag}]"), Err(e.clone()));
                    c.push(format!("factorization_residual[{tag}]"), Err(e));
                }
            }
        }
    }

    let m = elements.len();
    if m >= 1 {
        for i in 0..m {
            let (j, k) = ((i + 1) % m, (i + 2) % m);
            let tag = format!("x{i},x{j},x{k}");
            let (x, y, w) = (&elements[i], &elements[j], &elements[k]);
            c.push(
                format!("associativity[{tag}]"),
                (|| {
                    let left = hadamard_coeffs(&hadamard_coeffs(x, y)?, w)?;
                    let right = hadamard_coeffs(x, &hadamard_coeffs(y, w)?)?;
                    let (mut dev, mut mag) = (0.0f64, 0.0f64);
                    for (p, q) in left.coeffs().iter().zip(right.coeffs()) {
                        dev = dev.max(p.frobenius_distance(q));
                        mag = mag.max(p.frobenius_norm());
                    }
                    Ok(CheckEntry::equality("", dev, rel(1e-12, ts, mag), ""))
                })(),
            );
            c.push(
                format!("associativity_dilated[{tag}]"),
                (|| {
                    let xy = space.hadamard_dilated(&synth[i], &synth[j])?;
                    let yw = space.hadamard_dilated(&synth[j], &synth[k])?;
                    let left = space.hadamard_dilated(&xy, &synth[k])?;
                    let right = space.hadamard_dilated(&synth[i], &yw)?;
                    let (dev, mag) = max_dev(left.matrix(), right.matrix());
                    Ok(CheckEntry::equality("", dev, rel(1e-9, ts, mag), ""))
                })(),
            );
        }
    }

    Ok(CheckReport {
        entries: c.entries,
        seed: config.seed,
        instance: serde_json::Value::Null,
    })
}
