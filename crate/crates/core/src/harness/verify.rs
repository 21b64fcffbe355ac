//! The cross-pipeline check suite.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Fault, RunConfig};
use super::report::{compare_status, Status, VerificationReport};
use crate::bessel::{
    fiber_trace_check, gauss_manin_matrix, transfer_residual, FrobMatrix2, SplittingFunction,
};
use crate::error::{Error, Result};
use crate::exact::lpoly::l_sym_k_coeffs;
use crate::exact::BoundStatus;
use crate::padic::PadicElem;
use crate::sym::beta::{beta_matrix, check_classes, commutation_residual};
use crate::sym::lfun::{
    closed_points, determinant_from_beta, div_dilated, identity_report, l_sym_inf_euler, l_unit_euler,
    partial_sum_digits, tail_bound_digits, ClosedPoint, DeterminantRun, LSeriesPadic, SymSetup,
};
use crate::sym::{kernel_dim, KappaValue};

/// Digits the fiber trace comparison must reach.
pub const FIBER_DIGITS: u32 = 10;
/// Digits the symmetric-power identity must reach.
pub const IDENTITY_DIGITS: u32 = 8;
/// Highest T-degree compared by the identity and unit-root checks.
pub const COMPARE_DEGREE: usize = 3;
/// |x-exponent| window for the fiber matrices.
pub const FIBER_U_MAX: usize = 24;
/// Window of the kernel computation.
pub const KERNEL_WINDOW: usize = 16;

/// Applies a configured fault to freshly computed inputs.
pub fn apply_fault(setup: &SymSetup, fault: &Fault) -> Result<SymSetup> {
    let ctx = setup.ctx();
    let p = ctx.p() as i64;
    match *fault {
        Fault::None => Ok(setup.clone()),
        Fault::TamperTheta { index, shift } => {
            if index >= setup.theta.len() {
                return Err(Error::config("tampered theta index out of range"));
            }
            let delta = ctx.int(p).pow(shift as u64);
            let theta = setup.theta.tampered(index, delta);
            let frob = FrobMatrix2::level_one(&theta, SymSetup::frob_params(&setup.prof))?;
            SymSetup::from_parts(&setup.prof, theta, frob)
        }
        Fault::TamperFrobenius { shift } => {
            let mut frob = setup.frob.clone();
            let c = frob.entries[0][0].coeff(0) + ctx.int(p).pow(shift as u64);
            frob.entries[0][0].set(0, c);
            SymSetup::from_parts(&setup.prof, setup.theta.clone(), frob)
        }
    }
}

/// Determinant runs shared between checks, keyed by kappa.
pub struct Runs<'a> {
    setup: &'a SymSetup,
    map: BTreeMap<String, DeterminantRun>,
}

impl<'a> Runs<'a> {
    pub fn new(setup: &'a SymSetup) -> Runs<'a> {
        Runs {
            setup,
            map: BTreeMap::new(),
        }
    }

    /// Runs the determinant route once per kappa; the first run also
    /// records the commutation check.
    pub fn get(&mut self, kappa: &KappaValue, report: &mut VerificationReport) -> Result<&DeterminantRun> {
        let key = kappa.to_string();
        if !self.map.contains_key(&key) {
            let beta = beta_matrix(kappa, &self.setup.frob, &self.setup.prof)?;
            let cr = commutation_residual(&beta);
            let status = if cr.nonzero == 0 { Status::Pass } else { Status::Fail };
            let ctx = self.setup.ctx();
            report.add(
                format!("commutation kappa={kappa}"),
                "q d_kappa o beta_kappa = beta_kappa o d_kappa on the window interior",
                status,
                format!("{} nonzero of {}", cr.nonzero, cr.entries_checked),
                "0",
                cr.min_residual_units / (ctx.p() - 1),
            );
            let run = determinant_from_beta(self.setup, &beta, false)?;
            self.map.insert(key.clone(), run);
        }
        Ok(&self.map[&key])
    }
}

fn show(x: &PadicElem) -> String {
    x.to_integer_symmetric()
        .map_or_else(|| format!("{x:?}"), |v| v.to_string())
}

/// Coefficients as symmetric integers modulo p^digits.
fn show_series(s: &[PadicElem], digits: u32) -> String {
    let v: Vec<String> = s
        .iter()
        .map(|x| show(&x.with_abs(digits.min(x.precision_digits()) * (x.p() - 1))))
        .collect();
    format!("[{}]", v.join(", "))
}

fn show_poly(s: &crate::padic::series::Series) -> String {
    let terms: Vec<String> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => format!("{c}"),
            1 => format!("({c}) t"),
            _ => format!("({c}) t^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn record_error(report: &mut VerificationReport, name: &str, anchor: &str, e: &Error) {
    let status = if e.is_precision_starvation() {
        Status::Indeterminate
    } else {
        Status::Fail
    };
    report.add(name, anchor, status, e.to_string(), "", 0);
}

pub fn check_exact_lpolys(report: &mut VerificationReport, p: u32, ks: &[u32], terms: usize) {
    for &k in ks {
        let name = format!("exact lpoly p={p} k={k}");
        match l_sym_k_coeffs(p, 1, k, terms) {
            Ok(l) => {
                report.add(
                    name,
                    "L(Sym^k Kl, T) is a polynomial over Z",
                    Status::Pass,
                    l.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                    "integers",
                    0,
                );
                let rows = l.bound_report();
                let ok = rows.iter().all(|r| r.proven == BoundStatus::Holds);
                report.add(
                    format!("newton bound exact p={p} k={k}"),
                    "ord_q c_m >= (1 - 1/(p-1)) m(m-1)",
                    if ok { Status::Pass } else { Status::Fail },
                    rows.iter()
                        .map(|r| r.ord_q.clone().unwrap_or_else(|| "inf".into()))
                        .collect::<Vec<_>>()
                        .join(", "),
                    "bound",
                    0,
                );
            }
            Err(e) => record_error(report, &name, "L(Sym^k Kl, T) is a polynomial over Z", &e),
        }
    }
}

pub fn check_fiber_traces(report: &mut VerificationReport, theta: &SplittingFunction, ms: &[u32]) {
    let p = theta.ctx().p() as u64;
    for &m in ms {
        for t in 1..p {
            let name = format!("fiber trace t={t} m={m}");
            let anchor = "(q^m - 1) Tr(alpha_t^m) equals the Kloosterman sum";
            match fiber_trace_check(theta, t, m, FIBER_U_MAX) {
                Ok(r) => {
                    let agree = r.residual_units / (theta.ctx().p() - 1);
                    let status = if !r.pass {
                        Status::Fail
                    } else if r.n_eff >= FIBER_DIGITS {
                        Status::Pass
                    } else {
                        Status::Indeterminate
                    };
                    report.add(name, anchor, status, format!("agree to {agree} digits"), "", r.n_eff);
                }
                Err(e) => record_error(report, &name, anchor, &e),
            }
        }
    }
}

pub fn check_frobenius(report: &mut VerificationReport, setup: &SymSetup) {
    let ctx = setup.ctx();
    let f = &setup.frob;
    let p = ctx.p();
    let digits = setup.frob_units() / (p - 1);
    let a = [f.a(1).coeff(0), f.a(2).coeff(0), f.a(3).coeff(0), f.a(4).coeff(0)];
    let want = [ctx.one(), ctx.zero(), ctx.zero(), ctx.int(p as i64)];
    let ok = a[0] == want[0] && a[1] == want[1] && a[3] == want[3] && !a[2].is_zero();
    report.add(
        "frobenius constants",
        "A1(0) = 1, A2(0) = 0, A4(0) = p, A3(0) != 0",
        if ok { Status::Pass } else { Status::Fail },
        format!("{}, {}, {}, ord A3(0) = {}", show(&a[0]), show(&a[1]), show(&a[3]), a[2].valuation()),
        format!("1, 0, {p}, nonzero"),
        digits,
    );
    match gauss_manin_matrix(ctx) {
        Ok(gm) => {
            let pi2 = ctx.pi_pow(2);
            let ok = gm[0][0].coeffs().iter().all(|c| c.is_zero())
                && gm[0][1].coeff(0) == ctx.one()
                && gm[0][1].coeffs()[1..].iter().all(|c| c.is_zero())
                && gm[1][1].coeffs().iter().all(|c| c.is_zero())
                && gm[1][0].coeff(0).is_zero()
                && gm[1][0].coeff(1) == pi2
                && gm[1][0].coeffs()[2..].iter().all(|c| c.is_zero());
            report.add(
                "gauss-manin",
                "d(1) = pi t/x and d(pi t/x) = pi^2 t",
                if ok { Status::Pass } else { Status::Fail },
                format!(
                    "({}, {}) / ({}, {})",
                    show_poly(&gm[0][0]),
                    show_poly(&gm[0][1]),
                    show_poly(&gm[1][0]),
                    show_poly(&gm[1][1])
                ),
                "(0, 1) / (pi^2 t, 0)",
                ctx.n(),
            );
        }
        Err(e) => record_error(report, "gauss-manin", "d(1) = pi t/x", &e),
    }
    let res = transfer_residual(f, f.len());
    let need = setup.frob_units();
    report.add(
        "transfer equation",
        "H M = t dM/dt + p M H(t^p)",
        if res >= need { Status::Pass } else { Status::Fail },
        format!("residual valuation {res}"),
        format!(">= {need}"),
        need / (p - 1),
    );
    match check_classes(f) {
        Ok(_) => report.add(
            "valuation classes",
            "A-series coefficients lie in their valuation classes",
            Status::Pass,
            "ok",
            "",
            digits,
        ),
        Err(e) => record_error(report, "valuation classes", "A-series valuation classes", &e),
    }
}

pub fn check_identity(report: &mut VerificationReport, runs: &mut Runs, k: u32) {
    let name = format!("identity k={k}");
    let anchor = "L(Sym^k) = L(Sym^inf,k)(T) / L(Sym^inf,-(k+2))(q^(k+1) T)";
    let setup = runs.setup;
    let terms = COMPARE_DEGREE.min(setup.prof.m_t);
    let res = l_sym_k_coeffs(setup.prof.p, 1, k, terms).and_then(|ex| {
        let a = runs.get(&KappaValue::Int(k as i64), report)?.l.clone();
        let b = runs.get(&KappaValue::Int(-(k as i64) - 2), report)?.l.clone();
        identity_report(k, &a, &b, &ex.coeffs, terms)
    });
    match res {
        Ok(r) => {
            let agree = r.agree_digits.iter().copied().min().unwrap_or(0);
            let status = if r.pass {
                compare_status(agree, r.n_eff, IDENTITY_DIGITS)
            } else {
                Status::Fail
            };
            report.add(name, anchor, status, r.padic.join(", "), r.exact.join(", "), r.n_eff);
        }
        Err(e) => record_error(report, &name, anchor, &e),
    }
}

/// Partial sums at T = 1 against the Newton tail bound.
pub fn check_root_at_one(report: &mut VerificationReport, name: &str, l: &LSeriesPadic) {
    let need = tail_bound_digits(l.p, l.coeffs.len() - 1);
    let have = partial_sum_digits(l);
    let prec = l.partial_sum().precision_digits();
    let status = if have >= need {
        Status::Pass
    } else if have >= prec {
        Status::Indeterminate
    } else {
        Status::Fail
    };
    report.add(
        name,
        "T = 1 is a root: ord_p of the partial sum reaches the tail bound",
        status,
        format!("ord_p partial sum >= {have}"),
        format!(">= {need}"),
        prec,
    );
}

pub fn check_newton_padic(report: &mut VerificationReport, l: &LSeriesPadic) {
    let st = l.bound_status();
    let status = if st.contains(&BoundStatus::Violated) {
        Status::Fail
    } else if st.contains(&BoundStatus::Indeterminate) {
        Status::Indeterminate
    } else {
        Status::Pass
    };
    let pts: Vec<String> = l
        .newton_points()
        .iter()
        .map(|pt| pt.value.map_or_else(|| "inf".into(), |v| v.to_string()))
        .collect();
    report.add(
        format!("newton bound padic kappa={}", l.kappa),
        "ord_q c_m >= (1 - 1/(p-1)) m(m-1)",
        status,
        pts.join(", "),
        "bound",
        l.min_n_eff(),
    );
}

/// Agreement of two series through `upto`, in digits.
fn agreement(a: &[PadicElem], b: &[PadicElem], upto: usize) -> (u32, u32) {
    let p = a[0].p();
    let mut agree = u32::MAX;
    let mut avail = u32::MAX;
    for i in 0..=upto.min(a.len() - 1).min(b.len() - 1) {
        let d = a[i] - b[i];
        avail = avail.min(d.precision_digits());
        agree = agree.min(d.val_units() / (p - 1));
    }
    (agree.min(avail), avail)
}

pub fn check_unit_routes(
    report: &mut VerificationReport,
    runs: &mut Runs,
    points: &[ClosedPoint],
    kappa: &KappaValue,
    required: u32,
) -> Result<()> {
    let setup = runs.setup;
    let ctx = setup.ctx();
    let mt = setup.prof.m_t;
    let a = runs.get(kappa, report)?.l.clone();
    let b = runs.get(&kappa.minus(setup.prof.p, 2), report)?.l.clone();
    let q = ctx.int(setup.prof.q() as i64);
    let ratio = LSeriesPadic::new(kappa.clone(), div_dilated(&a.coeffs, &b.coeffs, q)?, a.cert_units.min(b.cert_units));
    let euler = l_unit_euler(points, ctx, kappa, mt)?;
    let upto = COMPARE_DEGREE.min(mt);
    let (agree, avail) = agreement(&ratio.coeffs, &euler.coeffs, upto);
    report.add(
        format!("unit routes kappa={kappa}"),
        "L_unit = L(Sym^inf,kappa)(T) / L(Sym^inf,kappa-2)(qT) = prod (1 - pi0^kappa T^deg)^-1",
        compare_status(agree, avail, required),
        show_series(&ratio.coeffs[..=upto], avail),
        show_series(&euler.coeffs[..=upto], avail),
        avail,
    );
    if kappa.as_int() == Some(0) {
        // (1 - T)/(1 - qT) = 1 + (q - 1) T + (q - 1) q T^2 + ...
        let qv = setup.prof.q() as i64;
        let mut want = vec![ctx.one()];
        let mut c = ctx.int(qv - 1);
        for _ in 1..=mt {
            want.push(c);
            c *= ctx.int(qv);
        }
        let (agree, avail) = agreement(&ratio.coeffs, &want, mt);
        report.add(
            "unit closed form kappa=0",
            "L_unit(0, T) = (1 - T)/(1 - qT)",
            compare_status(agree, avail, required),
            show_series(&ratio.coeffs, avail),
            show_series(&want, avail),
            avail,
        );
    }
    Ok(())
}

/// L(Sym^inf,0)(T) (1 - qT) = (1 - T) L(Sym^inf,-2)(qT).
pub fn check_zero_factorization(report: &mut VerificationReport, runs: &mut Runs) -> Result<()> {
    let setup = runs.setup;
    let ctx = setup.ctx();
    let q = ctx.int(setup.prof.q() as i64);
    let l0 = runs.get(&KappaValue::Int(0), report)?.l.clone();
    let l2 = runs.get(&KappaValue::Int(-2), report)?.l.clone();
    let n = l0.coeffs.len();
    let mut lhs = vec![ctx.zero(); n];
    let mut rhs = vec![ctx.zero(); n];
    let mut qk = ctx.one();
    for i in 0..n {
        lhs[i] = l0.coeffs[i] - if i > 0 { q * l0.coeffs[i - 1] } else { ctx.zero() };
        let cur = l2.coeffs[i] * qk;
        rhs[i] += cur;
        if i + 1 < n {
            rhs[i + 1] -= cur;
        }
        qk *= q;
    }
    let (agree, avail) = agreement(&lhs, &rhs, n - 1);
    report.add(
        "T=1 root kappa=0 factorization",
        "L(Sym^inf,0)(T) = (1 - T) L(Sym^inf,-2)(qT) / (1 - qT)",
        compare_status(agree, avail, 1),
        show_series(&lhs, avail),
        show_series(&rhs, avail),
        avail,
    );
    Ok(())
}

/// D(T) = L(T) D(qT) coefficient-wise.
pub fn check_delta_q(report: &mut VerificationReport, run: &DeterminantRun, q: u64) {
    let ctx = run.det[0].ctx();
    let n = run.det.len();
    let qe = ctx.int(q as i64);
    let mut worst = u32::MAX;
    let mut avail = u32::MAX;
    for k in 0..n {
        let mut acc = ctx.zero();
        let mut qi = ctx.one();
        for i in 0..=k {
            acc += run.l.coeffs[k - i] * run.det[i] * qi;
            qi *= qe;
        }
        let d = acc - run.det[k];
        worst = worst.min(d.val_units());
        avail = avail.min(d.abs_precision());
    }
    let p = ctx.p();
    report.add(
        format!("delta_q kappa={}", run.l.kappa),
        "D(T) = L(T) D(qT)",
        if worst >= avail { Status::Pass } else { Status::Fail },
        format!("residual {worst}"),
        format!(">= {avail}"),
        avail / (p - 1),
    );
}

pub fn check_kernels(report: &mut VerificationReport, p: u32) {
    let generic = KappaValue::Padic {
        digits: vec![3, 1, 4, 1, 0, 2, 2, 3, 4, 0, 1, 2],
    };
    let cases = [
        (KappaValue::Int(-1), 0usize),
        (KappaValue::Int(-2), 0),
        (generic, 0),
        (KappaValue::Int(0), 1),
    ];
    for (kappa, want) in cases {
        let name = format!("kernel kappa={kappa}");
        let anchor = "H^0 vanishes for kappa != 0 and is the constants for kappa = 0";
        match kernel_dim(&kappa, p, KERNEL_WINDOW, KERNEL_WINDOW) {
            Ok(r) => {
                let status = if r.indeterminate {
                    Status::Indeterminate
                } else if r.dim == want {
                    Status::Pass
                } else {
                    Status::Fail
                };
                report.add(name, anchor, status, r.dim.to_string(), want.to_string(), 0);
            }
            Err(e) => record_error(report, &name, anchor, &e),
        }
    }
}

/// k_n = 1 + (p-1) p^n converges to 1; agreement must grow with n.
pub fn check_continuity(report: &mut VerificationReport, runs: &mut Runs, levels: u32) -> Result<()> {
    let p = runs.setup.prof.p as i64;
    let base = runs.get(&KappaValue::Int(1), report)?.l.clone();
    let mut agrees = Vec::new();
    let mut avail = u32::MAX;
    for n in 1..=levels {
        let k = 1 + (p - 1) * p.pow(n);
        let l = runs.get(&KappaValue::Int(k), report)?.l.clone();
        let mut a = u32::MAX;
        for i in 1..l.coeffs.len() {
            let d = l.coeffs[i] - base.coeffs[i];
            a = a.min(d.val_units());
            avail = avail.min(d.abs_precision());
        }
        agrees.push(a);
    }
    let increasing = agrees.windows(2).all(|w| w[0] < w[1]);
    let saturated = agrees.iter().any(|&a| a >= avail);
    let status = if increasing && !saturated {
        Status::Pass
    } else if saturated {
        Status::Indeterminate
    } else {
        Status::Fail
    };
    report.add(
        "continuity k_n -> 1",
        "L(Sym^inf,k_n) -> L(Sym^inf,kappa) as k_n -> kappa p-adically",
        status,
        format!("agreement in pi-units {agrees:?}"),
        "strictly increasing",
        avail / (p as u32 - 1),
    );
    Ok(())
}

/// Commutation for a kappa with seeded random digits.
pub fn check_random_commutation(report: &mut VerificationReport, setup: &SymSetup, seed: u64) {
    let p = setup.prof.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let digits: Vec<u32> = (0..setup.prof.n_padic).map(|_| rng.gen_range(0..p)).collect();
    let kappa = KappaValue::Padic { digits };
    let name = "commutation random kappa";
    let anchor = "q d_kappa o beta_kappa = beta_kappa o d_kappa on the window interior";
    match beta_matrix(&kappa, &setup.frob, &setup.prof) {
        Ok(beta) => {
            let cr = commutation_residual(&beta);
            report.add(
                name,
                anchor,
                if cr.nonzero == 0 { Status::Pass } else { Status::Fail },
                format!("kappa = {kappa}: {} nonzero of {}", cr.nonzero, cr.entries_checked),
                "0",
                cr.min_residual_units / (p - 1),
            );
        }
        Err(e) => record_error(report, name, anchor, &e),
    }
}

/// Full suite for a configuration.
pub fn verify_all(cfg: &RunConfig, setup: &SymSetup) -> Result<VerificationReport> {
    cfg.validate()?;
    let setup = apply_fault(setup, &cfg.fault)?;
    let prof = &setup.prof;
    let p = prof.p;
    let mut report = VerificationReport::new(cfg.clone());

    check_exact_lpolys(&mut report, p, &[1, 2, 3, 4], prof.m_t.min(4));
    check_fiber_traces(&mut report, &setup.theta, &[1, 2]);
    check_frobenius(&mut report, &setup);
    check_kernels(&mut report, p);

    check_random_commutation(&mut report, &setup, cfg.seed);
    let mut runs = Runs::new(&setup);
    for k in [1u32, 2] {
        check_identity(&mut report, &mut runs, k);
    }
    for kappa in [-1i64, -3, 0] {
        let kv = KappaValue::Int(kappa);
        match runs.get(&kv, &mut report) {
            Ok(run) => {
                let run = run.clone();
                check_root_at_one(&mut report, &format!("T=1 root kappa={kappa}"), &run.l);
                check_newton_padic(&mut report, &run.l);
                check_delta_q(&mut report, &run, prof.q());
            }
            Err(e) => record_error(&mut report, &format!("T=1 root kappa={kappa}"), "T = 1 is a root", &e),
        }
    }
    if let Err(e) = check_zero_factorization(&mut report, &mut runs) {
        record_error(&mut report, "T=1 root kappa=0 factorization", "", &e);
    }
    match closed_points(&setup.theta, prof.m_t as u32) {
        Ok(points) => {
            for kappa in [KappaValue::Int(0), KappaValue::Int(2)] {
                if let Err(e) = check_unit_routes(&mut report, &mut runs, &points, &kappa, IDENTITY_DIGITS) {
                    record_error(&mut report, &format!("unit routes kappa={kappa}"), "", &e);
                }
            }
            let ctx = setup.ctx();
            let kv = KappaValue::Int(-1);
            match (runs.get(&kv, &mut report).map(|r| r.l.clone()), l_sym_inf_euler(&points, ctx, &kv, prof.m_t)) {
                (Ok(det), Ok(eul)) => {
                    let (agree, avail) = agreement(&det.coeffs, &eul.coeffs, prof.m_t);
                    report.add(
                        "euler product kappa=-1",
                        "det(1 - beta T)^delta_q = prod over closed points",
                        compare_status(agree, avail, IDENTITY_DIGITS),
                        show_series(&det.coeffs, avail),
                        show_series(&eul.coeffs, avail),
                        avail,
                    );
                }
                (Err(e), _) | (_, Err(e)) => record_error(&mut report, "euler product kappa=-1", "", &e),
            }
        }
        Err(e) => record_error(&mut report, "unit routes", "", &e),
    }
    if let Err(e) = check_continuity(&mut report, &mut runs, 3) {
        record_error(&mut report, "continuity k_n -> 1", "", &e);
    }
    Ok(report)
}

