use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::json;

use qbein_core::jackson::{
    backward_poly, forward_poly, jackson_backward, jackson_backward_printed, jackson_forward,
    jackson_integral, jackson_integral_exact, verify_cr_numeric, LatticeFunction,
    DEFAULT_INTEGRAL_TOL,
};
use qbein_core::ncalg::{
    verify_involution_consistency, verify_relation_suite, verify_subgroup_isomorphism, Suite,
};
use qbein_core::qm2d::{
    free_action, jackson_pairing, lambda_operator, one_loop_trace, plane_wave_k, spectrum,
    trace_term_closed, verify_cylinder, verify_operator_relations, verify_spectrum,
    verify_z_relations, Boundary, Hamiltonian, QmError, TraceConfig, TruncatedBasis,
};
use qbein_core::qspace::{
    bein_constraints, verify_bein_constraints_bcd, verify_twist_coordinates, Series,
};
use qbein_core::rmatrix::{
    build_bcd_r, build_gl_r, check_push_through, check_twist_lemmas, check_yang_baxter,
    one_parameter_params, twist_r, BcdConfig, BcdForm, Family, RMatrix,
};
use qbein_core::{DeformationParams, Entry, VerificationReport};

use crate::settings::Params;

/// What a command produced, in both output formats.
pub struct Output {
    pub pass: bool,
    pub json: String,
    pub csv: String,
    pub summary: String,
}

impl From<VerificationReport> for Output {
    fn from(rep: VerificationReport) -> Self {
        let summary = format!(
            "{} {}: {} passed, {} failed",
            if rep.pass { "PASS" } else { "FAIL" },
            rep.check,
            rep.passed,
            rep.failed
        );
        Output {
            pass: rep.pass,
            json: rep.to_json(),
            csv: rep.to_csv(),
            summary,
        }
    }
}

/// Usage or parameter error, reported with exit code 2.
pub type CmdResult<T> = Result<T, String>;

fn err(e: impl ToString) -> String {
    e.to_string()
}

const TRACE_REL_TOL: f64 = 1e-8;
const ACTION_REL_TOL: f64 = 1e-10;
const MAX_DIFF_POINTS: usize = 100_000;

fn n_of(p: &Params) -> usize {
    p.n.unwrap_or(2)
}

fn r_exact(p: &Params) -> BigRational {
    p.r.as_ref()
        .map(|r| r.0.clone())
        .unwrap_or_else(|| BigRational::new(1.into(), 2.into()))
}

fn r_f64(p: &Params) -> f64 {
    r_exact(p).to_f64().unwrap_or(f64::NAN)
}

/// Symbolic parameters, with `r` substituted when given.
fn deformation(p: &Params, n: usize, sqrt_r: bool) -> CmdResult<DeformationParams> {
    let base = if sqrt_r {
        DeformationParams::symbolic_with_sqrt_r(n)
    } else {
        DeformationParams::symbolic(n)
    };
    match &p.r {
        Some(r) => base.with_numeric_r(r.0.clone()).map_err(err),
        None => Ok(base),
    }
}

fn parse<T: std::str::FromStr>(value: &Option<String>, default: &str) -> CmdResult<T>
where
    T::Err: ToString,
{
    value.as_deref().unwrap_or(default).parse().map_err(err)
}

// ---- rmat ----

/// B/C/D matrices live at the one-parameter point; their twist uses the
/// factors fixed by the bein constraints.
fn r_matrix(p: &Params) -> CmdResult<(RMatrix, DeformationParams)> {
    let n = n_of(p);
    let family: Family = parse(&p.family, "GL")?;
    let twisted = p.twisted.unwrap_or(false);
    match family.series() {
        None => {
            let params = deformation(p, n, false)?;
            let r = build_gl_r(&params).map_err(err)?;
            let r = if twisted {
                twist_r(&r, &params).map_err(err)?
            } else {
                r
            };
            Ok((r, params))
        }
        Some(series) => {
            let params = one_parameter_params(&deformation(p, n, series == Series::B)?);
            let form: BcdForm = parse(&p.form, "amended")?;
            let mut cfg = BcdConfig::with_default_conventions(series, n)
                .map_err(err)?
                .with_form(form);
            if let Some(rho) = &p.rho {
                cfg.rho = Some(rho.iter().map(|x| x.0.clone()).collect());
            }
            if let Some(eps) = &p.eps {
                cfg.eps = Some(eps.clone());
            }
            let r = build_bcd_r(&cfg, &params).map_err(err)?;
            if !twisted {
                return Ok((r, params));
            }
            let factors = bein_constraints(&params, series).map_err(err)?.params;
            Ok((twist_r(&r, &factors).map_err(err)?, factors.twisted()))
        }
    }
}

fn matrix_output(m: &RMatrix) -> Output {
    let mut csv = String::from("m,n,p,s,value\n");
    for ([a, b, c, d], v) in m.nonzero() {
        csv.push_str(&format!("{a},{b},{c},{d},\"{v}\"\n"));
    }
    Output {
        pass: true,
        json: m.to_json(),
        csv,
        summary: format!(
            "{} R-matrix, N = {}, {} nonzero entries",
            m.family(),
            m.n(),
            m.nonzero().count()
        ),
    }
}

pub fn rmat_build(p: &Params) -> CmdResult<Output> {
    Ok(matrix_output(&r_matrix(p)?.0))
}

pub fn rmat_twist(p: &Params) -> CmdResult<Output> {
    let p = Params {
        twisted: Some(true),
        ..p.clone()
    };
    rmat_build(&p)
}

fn with_family(rep: VerificationReport, p: &Params) -> VerificationReport {
    rep.with_config("family", p.family.as_deref().unwrap_or("GL"))
        .with_config("twisted", p.twisted.unwrap_or(false))
}

pub fn rmat_ybe(p: &Params) -> CmdResult<Output> {
    let (m, _) = r_matrix(p)?;
    Ok(with_family(check_yang_baxter(&m), p).into())
}

pub fn rmat_push(p: &Params) -> CmdResult<Output> {
    let (m, params) = r_matrix(p)?;
    Ok(with_family(check_push_through(&m, &params).map_err(err)?, p).into())
}

pub fn rmat_lemmas(p: &Params) -> CmdResult<Output> {
    let params = deformation(p, n_of(p), false)?;
    Ok(check_twist_lemmas(&params).map_err(err)?.into())
}

// ---- twist ----

pub fn twist_coords(p: &Params) -> CmdResult<Output> {
    Ok(verify_twist_coordinates(&deformation(p, n_of(p), false)?).into())
}

pub fn twist_bein(p: &Params) -> CmdResult<Output> {
    let series: Series = parse(&p.series, "B")?;
    let n = p.n.ok_or("twist bein needs --n")?;
    let params = deformation(p, n, series == Series::B)?;
    Ok(verify_bein_constraints_bcd(&params, series)
        .map_err(err)?
        .into())
}

// ---- alg ----

fn alg_report(p: &Params) -> CmdResult<VerificationReport> {
    let n = n_of(p);
    let which = p.suite.as_deref().unwrap_or("all");
    match which {
        "involution" => verify_involution_consistency().map_err(err),
        "subgroup" => verify_subgroup_isomorphism().map_err(err),
        "all" => {
            let mut rep = VerificationReport::new("alg").with_config("n", n);
            for suite in Suite::ALL {
                let dim = if suite.two_dimensional() { 2 } else { n };
                rep.absorb(verify_relation_suite(suite, dim).map_err(err)?);
            }
            rep.absorb(verify_involution_consistency().map_err(err)?);
            rep.absorb(verify_subgroup_isomorphism().map_err(err)?);
            Ok(rep)
        }
        name => {
            let suite: Suite = name.parse().map_err(err)?;
            verify_relation_suite(suite, n).map_err(err)
        }
    }
}

pub fn alg_check(p: &Params) -> CmdResult<Output> {
    Ok(alg_report(p)?.into())
}

// ---- jackson ----

/// `{"2,0,1": "3/2", ...}` or one of the named polynomials.
fn parse_function(
    text: &str,
    n: Option<usize>,
) -> CmdResult<(usize, BTreeMap<Vec<u32>, BigRational>)> {
    let unit = |n: usize, i: usize, k: u32| {
        let mut a = vec![0; n];
        a[i] = k;
        (a, BigRational::one())
    };
    let named = |n: usize| -> Option<BTreeMap<Vec<u32>, BigRational>> {
        match text {
            "sum" => Some((0..n).map(|i| unit(n, i, 1)).collect()),
            "square" => Some((0..n).map(|i| unit(n, i, 2)).collect()),
            "product" => Some(BTreeMap::from([(vec![1; n], BigRational::one())])),
            _ => None,
        }
    };
    if let Some(c) = named(n.unwrap_or(2)) {
        return Ok((n.unwrap_or(2), c));
    }
    let raw: BTreeMap<String, String> = serde_json::from_str(text)
        .map_err(|e| format!("--func: expected sum, product, square or a JSON object: {e}"))?;
    let mut coeffs = BTreeMap::new();
    let mut dim = n;
    for (key, value) in raw {
        let exps: Vec<u32> = key
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("--func: bad exponent list `{key}`"))?;
        if *dim.get_or_insert(exps.len()) != exps.len() {
            return Err(format!(
                "--func: `{key}` has {} exponents, expected {}",
                exps.len(),
                dim.unwrap()
            ));
        }
        let c: crate::settings::Rat = value.parse()?;
        coeffs.insert(exps, c.0);
    }
    Ok((dim.ok_or("--func: empty polynomial")?, coeffs))
}

fn lattice_points(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    (0..n).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |l| {
                    let mut w = v.clone();
                    w.push(l);
                    w
                })
            })
            .collect()
    })
}

/// Lattice derivative at every point of a cube, beside the monomial-basis action.
pub fn jackson_diff(p: &Params) -> CmdResult<Output> {
    let (n, coeffs) = parse_function(p.func.as_deref().unwrap_or("sum"), p.n)?;
    let f = LatticeFunction::monomial(n, coeffs).map_err(err)?;
    let r = r_exact(p);
    let axis = p.axis.unwrap_or(1);
    let dir = match p.dir.as_deref().unwrap_or("forward") {
        "forward" | "fwd" => "forward",
        "backward" | "bwd" => "backward",
        "backward-printed" | "bwd-printed" => "backward-printed",
        other => return Err(format!("unknown direction `{other}`")),
    };
    let (lo, hi) = (p.lmin.unwrap_or(-2), p.lmax.unwrap_or(2));
    if lo > hi {
        return Err(format!("empty lattice range {lo}..{hi}"));
    }
    let points = ((hi - lo + 1) as f64).powi(n as i32);
    if points > MAX_DIFF_POINTS as f64 {
        return Err(format!(
            "{points} lattice points exceed the limit of {MAX_DIFF_POINTS}"
        ));
    }
    let poly = match dir {
        "forward" => forward_poly(&f, &r, axis),
        _ => backward_poly(&f, &r, axis),
    }
    .map_err(err)?;

    let mut header: Vec<String> = (1..=n).map(|i| format!("l{i}")).collect();
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend(["f", "derivative", "monomial_action", "agrees"].map(String::from));
    let mut csv = format!(
        "# r={r}\n# axis={axis}\n# dir={dir}\n{}\n",
        header.join(",")
    );
    let mut rows = Vec::new();
    let mut disagree = 0;
    for l in lattice_points(n, lo, hi) {
        let x: Vec<BigRational> = l.iter().map(|&k| pow(&r, -k)).collect();
        let d = match dir {
            "forward" => jackson_forward(&f, &r, axis, &x),
            "backward" => jackson_backward(&f, &r, axis, &x),
            _ => jackson_backward_printed(&f, &r, axis, &x),
        }
        .map_err(err)?;
        let fx = f.eval(&x).map_err(err)?;
        let expect = poly.eval(&x).map_err(err)?;
        let agrees = d == expect;
        disagree += usize::from(!agrees);
        let cells: Vec<String> = l
            .iter()
            .map(ToString::to_string)
            .chain(x.iter().map(ToString::to_string))
            .chain([
                fx.to_string(),
                d.to_string(),
                expect.to_string(),
                agrees.to_string(),
            ])
            .collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
        rows.push(json!({"l": l, "x": x.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "f": fx.to_string(), "derivative": d.to_string(), "monomial_action": expect.to_string(), "agrees": agrees}));
    }
    // the printed backward form is a control and is expected to disagree
    let pass = dir == "backward-printed" || disagree == 0;
    let json = serde_json::to_string_pretty(
        &json!({"r": r.to_string(), "axis": axis, "dir": dir, "rows": rows}),
    )
    .map_err(err)?;
    Ok(Output {
        pass,
        json,
        csv,
        summary: format!(
            "{} jackson diff ({dir}): {disagree} of {} points disagree",
            if pass { "PASS" } else { "FAIL" },
            rows.len()
        ),
    })
}

fn pow(r: &BigRational, k: i64) -> BigRational {
    let base = if k < 0 { r.recip() } else { r.clone() };
    (0..k.unsigned_abs()).fold(BigRational::one(), |acc, _| acc * &base)
}

/// Exact integral of a polynomial beside the numerically summed series.
pub fn jackson_int(p: &Params) -> CmdResult<Output> {
    let (n, coeffs) = parse_function(p.func.as_deref().unwrap_or("sum"), Some(p.n.unwrap_or(1)))?;
    if n != 1 {
        return Err("jackson int handles one variable (--n 1)".into());
    }
    let r = r_exact(p);
    let k = p.k.unwrap_or(0);
    let tol = p.tol.map_or(DEFAULT_INTEGRAL_TOL, |t| t.0);
    let as_f64: BTreeMap<Vec<u32>, f64> = coeffs
        .iter()
        .map(|(a, c)| (a.clone(), c.to_f64().unwrap_or(f64::NAN)))
        .collect();
    let exact = jackson_integral_exact(&LatticeFunction::monomial(1, coeffs).map_err(err)?, &r, k)
        .map_err(err)?;
    let f = LatticeFunction::monomial(1, as_f64).map_err(err)?;
    let num = jackson_integral(&f, &r.to_f64().unwrap_or(f64::NAN), k, tol).map_err(err)?;
    let exact_f = exact.to_f64().unwrap_or(f64::NAN);
    let gap = (num.value - exact_f).abs();
    let pass = gap <= num.tail_bound + 1e-12 * exact_f.abs().max(1.0);
    let fields = [
        ("r", r.to_string()),
        ("K", k.to_string()),
        ("exact", exact.to_string()),
        ("exact_f64", format!("{exact_f:.16e}")),
        ("numeric", format!("{:.16e}", num.value)),
        ("tail_bound", format!("{:.3e}", num.tail_bound)),
        ("terms", num.terms.to_string()),
        ("pass", pass.to_string()),
    ];
    let mut csv = String::from("key,value\n");
    for (k, v) in &fields {
        csv.push_str(&format!("{k},{v}\n"));
    }
    let obj: serde_json::Map<String, serde_json::Value> = fields
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    Ok(Output {
        pass,
        json: serde_json::to_string_pretty(&obj).map_err(err)?,
        csv,
        summary: format!(
            "{} jackson int: exact {exact}, numeric {:.12e}",
            if pass { "PASS" } else { "FAIL" },
            num.value
        ),
    })
}

pub fn jackson_check(p: &Params) -> CmdResult<Output> {
    let rep = verify_cr_numeric(
        n_of(p),
        r_f64(p),
        p.trials.unwrap_or(1000),
        p.seed.unwrap_or(2024),
    )
    .map_err(err)?;
    Ok(rep.into())
}

// ---- qm ----

fn basis(p: &Params, l: usize, m: usize) -> CmdResult<TruncatedBasis> {
    let boundary: Boundary = parse(&p.boundary, "cyclic")?;
    TruncatedBasis::new(p.l.unwrap_or(l), p.m.unwrap_or(m), boundary, r_exact(p)).map_err(err)
}

fn qm_relations_report(p: &Params) -> CmdResult<VerificationReport> {
    let b = basis(p, 8, 2)?;
    let mut rep = verify_operator_relations(&b);
    rep.absorb(verify_z_relations(&b));
    Ok(rep)
}

pub fn qm_relations(p: &Params) -> CmdResult<Output> {
    Ok(qm_relations_report(p)?.into())
}

pub fn qm_spectrum(p: &Params) -> CmdResult<Output> {
    let b = basis(p, 16, 4)?;
    let which: Hamiltonian = parse(&p.which, "H")?;
    let s = spectrum(&b, which, p.omega.map_or(1.0, |w| w.0)).map_err(err)?;
    let mut out = Output::from(verify_spectrum(&s));
    out.csv = s.to_csv();
    Ok(out)
}

fn qm_trace_report(p: &Params) -> CmdResult<VerificationReport> {
    let cfg = TraceConfig {
        r: r_f64(p),
        mu2: p.mu2.map_or(0.01, |m| m.0),
        m_max: p.m.unwrap_or(20),
        tol: p.tol.map_or(1e-12, |t| t.0),
    };
    let mut rep = VerificationReport::new("qm_trace")
        .with_config("r", cfg.r)
        .with_config("mu2", cfg.mu2)
        .with_config("M", cfg.m_max)
        .with_config("tol", cfg.tol);
    match one_loop_trace(&cfg) {
        Ok(t) => {
            for &(m, v) in &t.per_m {
                let closed = trace_term_closed(cfg.r, cfg.mu2, m);
                rep.push(
                    Entry::float(format!("m={m}"), &[m], (v - closed) / closed, TRACE_REL_TOL)
                        .with_note(format!("{v:.16e}")),
                );
            }
            rep.push(Entry::flag(
                "tail bound finite",
                &[],
                t.tail_bound.is_finite(),
            ));
            Ok(rep
                .with_config("value", format!("{:.16e}", t.value))
                .with_config("tail_bound", format!("{:.3e}", t.tail_bound)))
        }
        Err(QmError::InfraredDivergence) => {
            rep.push(Entry::error(
                "InfraredDivergence",
                &[0],
                QmError::InfraredDivergence.to_string(),
            ));
            Ok(rep)
        }
        Err(e) => Err(e.to_string()),
    }
}

pub fn qm_trace(p: &Params) -> CmdResult<Output> {
    Ok(qm_trace_report(p)?.into())
}

/// Action of every plane wave against eigenvalue times its pairing.
fn qm_action_report(p: &Params) -> CmdResult<VerificationReport> {
    let b = basis(p, 10, 3)?;
    let omega = p.omega.map_or(1.0, |w| w.0);
    let (l, r) = (b.sites(), b.r_f64());
    let mut rep = VerificationReport::new("qm_action")
        .with_config("L", l)
        .with_config("M", b.max_mode())
        .with_config("r", b.r())
        .with_config("omega", omega);
    for k in 0..l {
        for m in b.modes() {
            let start = b.index(0, m).ok_or("mode outside the basis")?;
            let v: Vec<Complex64> = plane_wave_k(&b, k, m).map_err(err)?[start..start + l].to_vec();
            let mut field = BTreeMap::from([(-m, v.iter().map(|c| c.conj()).collect::<Vec<_>>())]);
            field.insert(m, v);
            let s = free_action(&b, &field, omega).map_err(err)?;
            let norm = jackson_pairing(&b, &field).map_err(err)?;
            let momentum = 2.0 * std::f64::consts::PI * k as f64 / (l as f64 * b.chi().abs());
            let expect = lambda_operator(r, momentum, m) * norm;
            let rel = (s - expect).norm() / expect.norm().max(norm.norm());
            rep.push(Entry::float(
                format!("k={k} m={m}"),
                &[k as i64, m],
                rel,
                ACTION_REL_TOL,
            ));
        }
    }
    let constant = BTreeMap::from([(0, vec![Complex64::new(1.0, 0.0); l])]);
    let s0 = free_action(&b, &constant, omega).map_err(err)?;
    rep.push(Entry::float("constant mode", &[], s0.norm(), 1e-12));
    Ok(rep)
}

pub fn qm_action(p: &Params) -> CmdResult<Output> {
    Ok(qm_action_report(p)?.into())
}

pub fn qm_cylinder(p: &Params) -> CmdResult<Output> {
    Ok(verify_cylinder(&basis(p, 16, 0)?).into())
}

// ---- all ----

/// Every check at small sizes, in one report.
pub fn all(p: &Params) -> CmdResult<Output> {
    let n = n_of(p);
    let params = deformation(p, n, false)?;
    let mut rep = VerificationReport::new("all")
        .with_config("n", n)
        .with_config("r", r_exact(p));
    rep.absorb(verify_twist_coordinates(&params));
    rep.absorb(check_twist_lemmas(&params).map_err(err)?);
    let gl = build_gl_r(&params).map_err(err)?;
    rep.absorb(check_yang_baxter(&gl));
    rep.absorb(check_yang_baxter(&twist_r(&gl, &params).map_err(err)?));
    rep.absorb(check_push_through(&gl, &params).map_err(err)?);
    rep.absorb(alg_report(&Params {
        suite: Some("all".into()),
        ..p.clone()
    })?);
    rep.absorb(
        verify_cr_numeric(n, r_f64(p), p.trials.unwrap_or(200), p.seed.unwrap_or(2024))
            .map_err(err)?,
    );
    let qm = Params {
        boundary: Some("cyclic".into()),
        ..p.clone()
    };
    rep.absorb(qm_relations_report(&qm)?);
    let b = basis(&qm, 16, 4)?;
    rep.absorb(verify_spectrum(
        &spectrum(&b, Hamiltonian::Log, 1.0).map_err(err)?,
    ));
    rep.absorb(qm_trace_report(&qm)?);
    rep.absorb(qm_action_report(&qm)?);
    rep.absorb(verify_cylinder(&b));
    Ok(rep.into())
}
