use std::fmt;
use std::str::FromStr;

use super::{
    build_dilatation, realization_symbol, DilatationVariant, Generator, NCElement, NcError,
    RewriteSystem,
};
use crate::report::{Entry, Residual, VerificationReport};

use DilatationVariant::{Plain, Tilde};
use Generator::{Coord as X, Deriv as D, Tilde as T};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Coordinate and derivative relations.
    Calculus,
    /// Dilatations `A_i` against coordinates and each other.
    Dilatations,
    /// `(1-r) x^i d_i = A_(i+1) - A_i`.
    Difference,
    /// Coordinate and tilde-derivative relations.
    TildeCalculus,
    /// Tilde dilatations against coordinates, with the printed boundary case as a control.
    TildeDilatations,
    /// The two-dimensional relations, including mixed derivatives.
    Plane,
    /// Products of dilatations.
    Products,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Calculus,
        Suite::Dilatations,
        Suite::Difference,
        Suite::TildeCalculus,
        Suite::TildeDilatations,
        Suite::Plane,
        Suite::Products,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::Calculus => "calculus",
            Suite::Dilatations => "dilatations",
            Suite::Difference => "difference",
            Suite::TildeCalculus => "tilde-calculus",
            Suite::TildeDilatations => "tilde-dilatations",
            Suite::Plane => "plane",
            Suite::Products => "products",
        }
    }

    /// Suites that only make sense on the plane.
    pub fn two_dimensional(self) -> bool {
        matches!(self, Suite::Plane | Suite::Products)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

struct Checker {
    sys: RewriteSystem,
    report: VerificationReport,
}

impl Checker {
    fn realization_entry(&self, id: &str, lhs: &NCElement, rhs: &NCElement) -> Entry {
        let id = format!("{id} [realization]");
        match realization_symbol(&(lhs - rhs), self.sys.n()) {
            Ok(sym) => {
                let mut e = Entry::flag(id, &[], sym.is_zero());
                e.residual = Residual::Exact(sym.residual_string());
                e.residual_terms = sym.terms.len();
                e
            }
            Err(err) => Entry::error(id, &[], err.to_string()),
        }
    }

    /// Holds in the rewrite algebra and in the realization.
    fn both(&mut self, id: &str, lhs: &NCElement, rhs: &NCElement) {
        let e = self.sys.relation_entry(id, lhs, rhs);
        self.report.push(e);
        let e = self.realization_entry(id, lhs, rhs);
        self.report.push(e);
    }

    /// Holds only as operators on functions.
    fn realized(&mut self, id: &str, lhs: &NCElement, rhs: &NCElement, note: &str) {
        let e = self.realization_entry(id, lhs, rhs).with_note(note);
        self.report.push(e);
    }

    /// `lhs - rhs` equals an explicit combination of implied relations.
    fn certified(
        &mut self,
        id: &str,
        lhs: &NCElement,
        rhs: &NCElement,
        cert: &NCElement,
        note: &str,
    ) {
        let e = self
            .sys
            .relation_entry(&format!("{id} [certificate]"), lhs, &(rhs + cert))
            .with_note(note);
        self.report.push(e);
        let e = self.realization_entry(id, lhs, rhs);
        self.report.push(e);
    }

    /// A misprinted relation that must fail in the realization.
    fn control(&mut self, id: &str, lhs: &NCElement, rhs: &NCElement, note: &str) {
        let e = self.realization_entry(id, lhs, rhs).expect_failure(note);
        self.report.push(e);
    }

    fn w(&self, w: &[Generator]) -> NCElement {
        self.sys.word(w)
    }

    fn cw(&self, c: &str, w: &[Generator]) -> NCElement {
        NCElement::term(self.sys.poly(c), w.to_vec())
    }

    fn dil(&self, i: usize, v: DilatationVariant) -> Result<NCElement, NcError> {
        build_dilatation(&self.sys, i, v)
    }
}

const REALIZATION_ONLY: &str = "holds for the difference operators; not derived from the rules";

/// Relations implied in the plane calculus but not reachable by rewriting:
/// the residuals `k1`, `k2` of the two open overlaps `dt2 d1 x1` and
/// `dt2 d1 x2`, and `e = d2 dt1 - r d1 dt2`, which holds for the difference
/// operators.
struct Implied {
    k1: NCElement,
    k2: NCElement,
    e: NCElement,
}

impl Implied {
    fn new(sys: &RewriteSystem) -> Result<Self, NcError> {
        let k1 = sys.overlap_residual(&[T(2), D(1), X(1)])?;
        let k2 = sys.overlap_residual(&[T(2), D(1), X(2)])?;
        let e = &sys.word(&[D(2), T(1)]) - &NCElement::term(sys.r(), vec![D(1), T(2)]);
        Ok(Implied { k1, k2, e })
    }

    /// `a * x1 k2 + b * x2 k1 + c * x1 x2 e`
    fn combo(&self, sys: &RewriteSystem, a: &str, b: &str, c: &str) -> NCElement {
        let x1k2 = &NCElement::term(sys.poly(a), vec![X(1)]) * &self.k2;
        let x2k1 = &NCElement::term(sys.poly(b), vec![X(2)]) * &self.k1;
        let x1x2e = &NCElement::term(sys.poly(c), vec![X(1), X(2)]) * &self.e;
        &(&x1k2 + &x2k1) + &x1x2e
    }
}

/// Run one relation suite in `N` variables (`N = 2` for the plane suites).
pub fn verify_relation_suite(suite: Suite, n: usize) -> Result<VerificationReport, NcError> {
    if n == 0 || (suite.two_dimensional() && n != 2) {
        return Err(NcError::IndexOutOfRange { index: n, n: 2 });
    }
    let sys = RewriteSystem::calculus(n)?;
    let report = VerificationReport::new(format!("relations_{suite}"))
        .with_config("n", n)
        .with_config("suite", suite);
    let mut c = Checker { sys, report };
    match suite {
        Suite::Calculus | Suite::TildeCalculus => {
            let tilde = suite == Suite::TildeCalculus;
            let has = |a: &Generator, b: &Generator, f: fn(&Generator) -> bool| f(a) || f(b);
            let mut rules: Vec<_> = c
                .sys
                .rules()
                .filter(|((a, b), _)| {
                    let tildes = has(a, b, |g| matches!(g, T(_)));
                    let plain = has(a, b, |g| matches!(g, D(_)));
                    if tilde {
                        tildes && !plain
                    } else {
                        !tildes
                    }
                })
                .map(|((a, b), rhs)| (a.clone(), b.clone(), rhs.clone()))
                .collect();
            rules.sort_by_key(|(a, b, _)| (a.clone(), b.clone()));
            for (a, b, rhs) in rules {
                let lhs = c.w(&[a.clone(), b.clone()]);
                c.both(&format!("{a}*{b}"), &lhs, &rhs);
            }
        }
        Suite::Dilatations => {
            for i in 1..=n {
                let ai = c.dil(i, Plain)?;
                for k in 1..=n {
                    let ak = c.dil(k, Plain)?;
                    let xk = c.w(&[X(k)]);
                    if k > i {
                        c.both(
                            &format!("A{i}*A{k} = A{k}*A{i}"),
                            &(&ai * &ak),
                            &(&ak * &ai),
                        );
                        c.both(
                            &format!("A{k}*x{i} = x{i}*A{k}"),
                            &(&ak * &c.w(&[X(i)])),
                            &(&c.w(&[X(i)]) * &ak),
                        );
                    }
                    if k >= i {
                        let rhs = &c.cw("r", &[X(k)]) * &ai;
                        c.both(&format!("A{i}*x{k} = r*x{k}*A{i}"), &(&ai * &xk), &rhs);
                    }
                }
            }
        }
        Suite::Difference => {
            for i in 1..=n {
                let lhs = c.cw("1 - r", &[X(i), D(i)]);
                let rhs = &c.dil(i + 1, Plain)? - &c.dil(i, Plain)?;
                c.both(&format!("(1-r)*x{i}*d{i} = A{}-A{i}", i + 1), &lhs, &rhs);
            }
        }
        Suite::TildeDilatations => {
            for i in 1..=n {
                let ati = c.dil(i, Tilde)?;
                let xi = c.w(&[X(i)]);
                for k in 1..=n {
                    let atk = c.dil(k, Tilde)?;
                    let xk = c.w(&[X(k)]);
                    if k >= i {
                        let rhs = &c.cw("r^-1", &[X(i)]) * &atk;
                        c.both(
                            &format!("At{k}*x{i} = r^-1*x{i}*At{k}"),
                            &(&atk * &xi),
                            &rhs,
                        );
                    }
                    if k > i {
                        c.both(
                            &format!("At{i}*x{k} = x{k}*At{i}"),
                            &(&ati * &xk),
                            &(&xk * &ati),
                        );
                        c.both(
                            &format!("At{i}*At{k} = At{k}*At{i}"),
                            &(&ati * &atk),
                            &(&atk * &ati),
                        );
                    }
                }
                c.control(
                    &format!("printed: At{i}*x{i} = x{i}*At{i}"),
                    &(&ati * &xi),
                    &(&xi * &ati),
                    "the printed boundary case k = i is off by a factor r^-1",
                );
            }
        }
        Suite::Plane => plane_relations(&mut c)?,
        Suite::Products => {
            let [a, ab] = [c.dil(1, Plain)?, c.dil(2, Plain)?];
            let [at, atb] = [c.dil(1, Tilde)?, c.dil(2, Tilde)?];
            let one = c.sys.one();
            let imp = Implied::new(&c.sys)?;
            implied_entries(&mut c, &imp);
            let cert = imp.combo(&c.sys, "r^-2", "-r^-1", "r^-1 - 2 + r");
            c.certified(
                "Atildebar*A = 1",
                &(&atb * &a),
                &one,
                &cert,
                "x1 k2/r^2 - x2 k1/r + (1-r)^2/r x1 x2 e",
            );
            let cert = imp.combo(&c.sys, "0", "-r^-1", "0");
            c.certified(
                "Atildebar*Abar = Atilde",
                &(&atb * &ab),
                &at,
                &cert,
                "-x2 k1/r",
            );
            let cert = imp.combo(&c.sys, "r^-2", "0", "0");
            c.certified("Atilde*A = Abar", &(&at * &a), &ab, &cert, "x1 k2/r^2");
            // same identities in the abstract presentation, plus its consistency
            let plane = RewriteSystem::dilatation_plane()?;
            let [pa, pab, pat, patb] = ["A", "Abar", "Atilde", "Atildebar"].map(Generator::abs);
            for (id, lhs, rhs) in [
                (
                    "plane: Atildebar*A = 1",
                    vec![patb.clone(), pa.clone()],
                    vec![],
                ),
                (
                    "plane: Atildebar*Abar = Atilde",
                    vec![patb, pab.clone()],
                    vec![pat.clone()],
                ),
                ("plane: Atilde*A = Abar", vec![pat, pa], vec![pab]),
            ] {
                c.report
                    .push(plane.relation_entry(id, &plane.word(&lhs), &plane.word(&rhs)));
            }
            let conf = plane.local_confluence();
            c.report.push(
                Entry::flag("plane: local confluence", &[], conf.pass)
                    .with_note(format!("{} overlaps", conf.entries.len())),
            );
            let mut rules: Vec<_> = plane
                .rules()
                .map(|((x, y), r)| (x.clone(), y.clone(), r.clone()))
                .collect();
            rules.sort_by_key(|(x, y, _)| (x.clone(), y.clone()));
            for (x, y, rhs) in rules {
                let id = format!("plane rule {x}*{y}");
                let e = c.realization_entry(&id, &plane.word(&[x, y]), &rhs);
                c.report.push(e);
            }
        }
    }
    Ok(c.report)
}

fn implied_entries(c: &mut Checker, imp: &Implied) {
    let zero = c.sys.one().scale(&c.sys.poly("0"));
    for (id, rel) in [("k1", &imp.k1), ("k2", &imp.k2)] {
        let e = c.realization_entry(&format!("open overlap {id} = {rel}"), rel, &zero);
        c.report
            .push(e.with_note("implied by the rules, so must vanish"));
    }
    c.realized("e: d2*dt1 = r*d1*dt2", &imp.e, &zero, REALIZATION_ONLY);
}

fn plane_relations(c: &mut Checker) -> Result<(), NcError> {
    let (z, zb) = (X(1), X(2));
    let (d, db, dt, dtb) = (D(1), D(2), T(1), T(2));
    let one = c.sys.one();
    let w = |c: &Checker, g: &[Generator]| c.w(g);

    // coordinates and same-type derivatives
    c.both(
        "z*zbar = zbar*z",
        &w(c, &[z.clone(), zb.clone()]),
        &w(c, &[zb.clone(), z.clone()]),
    );
    c.both(
        "d*dbar = r^-1*dbar*d",
        &w(c, &[d.clone(), db.clone()]),
        &c.cw("r^-1", &[db.clone(), d.clone()]),
    );
    c.both(
        "dt*dtbar = r^-1*dtbar*dt",
        &w(c, &[dt.clone(), dtb.clone()]),
        &c.cw("r^-1", &[dtb.clone(), dt.clone()]),
    );

    let rhs =
        &(&one + &c.cw("r", &[z.clone(), d.clone()])) + &c.cw("r - 1", &[zb.clone(), db.clone()]);
    c.both(
        "d*z = 1 + r*z*d + (r-1)*zbar*dbar",
        &w(c, &[d.clone(), z.clone()]),
        &rhs,
    );
    let rhs = &one + &c.cw("r", &[zb.clone(), db.clone()]);
    c.both(
        "dbar*zbar = 1 + r*zbar*dbar",
        &w(c, &[db.clone(), zb.clone()]),
        &rhs,
    );
    c.both(
        "d*zbar = r*zbar*d",
        &w(c, &[d.clone(), zb.clone()]),
        &c.cw("r", &[zb.clone(), d.clone()]),
    );
    c.both(
        "dbar*z = z*dbar",
        &w(c, &[db.clone(), z.clone()]),
        &w(c, &[z.clone(), db.clone()]),
    );

    let [a, ab] = [c.dil(1, Plain)?, c.dil(2, Plain)?];
    let [at, atb] = [c.dil(1, Tilde)?, c.dil(2, Tilde)?];
    let (wz, wzb) = (
        w(c, std::slice::from_ref(&z)),
        w(c, std::slice::from_ref(&zb)),
    );
    let (rz, rzb) = (
        c.cw("r", std::slice::from_ref(&z)),
        c.cw("r", std::slice::from_ref(&zb)),
    );
    let (iz, izb) = (
        c.cw("r^-1", std::slice::from_ref(&z)),
        c.cw("r^-1", std::slice::from_ref(&zb)),
    );
    c.both("A*z = r*z*A", &(&a * &wz), &(&rz * &a));
    c.both("A*zbar = r*zbar*A", &(&a * &wzb), &(&rzb * &a));
    c.both("Abar*z = z*Abar", &(&ab * &wz), &(&wz * &ab));
    c.both("Abar*zbar = r*zbar*Abar", &(&ab * &wzb), &(&rzb * &ab));

    let rhs = &one + &c.cw("r^-1", &[z.clone(), dt.clone()]);
    c.both(
        "dt*z = 1 + r^-1*z*dt",
        &w(c, &[dt.clone(), z.clone()]),
        &rhs,
    );
    let rhs = &(&one + &c.cw("r^-1 - 1", &[z.clone(), dt.clone()]))
        + &c.cw("r^-1", &[zb.clone(), dtb.clone()]);
    c.both(
        "dtbar*zbar = 1 + (r^-1-1)*z*dt + r^-1*zbar*dtbar",
        &w(c, &[dtb.clone(), zb.clone()]),
        &rhs,
    );
    c.both(
        "dt*zbar = zbar*dt",
        &w(c, &[dt.clone(), zb.clone()]),
        &w(c, &[zb.clone(), dt.clone()]),
    );
    c.both(
        "dtbar*z = r^-1*z*dtbar",
        &w(c, &[dtb.clone(), z.clone()]),
        &c.cw("r^-1", &[z.clone(), dtb.clone()]),
    );

    c.both("Atilde*z = r^-1*z*Atilde", &(&at * &wz), &(&iz * &at));
    c.both("Atilde*zbar = zbar*Atilde", &(&at * &wzb), &(&wzb * &at));
    c.both(
        "Atildebar*z = r^-1*z*Atildebar",
        &(&atb * &wz),
        &(&iz * &atb),
    );
    c.both(
        "Atildebar*zbar = r^-1*zbar*Atildebar",
        &(&atb * &wzb),
        &(&izb * &atb),
    );

    let imp = Implied::new(&c.sys)?;
    c.both("Abar*Atilde = Atilde*Abar", &(&ab * &at), &(&at * &ab));
    c.both("A*Abar = Abar*A", &(&a * &ab), &(&ab * &a));
    c.both(
        "Atilde*Atildebar = Atildebar*Atilde",
        &(&at * &atb),
        &(&atb * &at),
    );
    let cert = imp.combo(&c.sys, "-r^-2 + r^-1", "0", "0");
    c.certified(
        "A*Atilde = Atilde*A",
        &(&a * &at),
        &(&at * &a),
        &cert,
        "-(1-r)/r^2 x1 k2",
    );
    let cert = imp.combo(&c.sys, "0", "r^-1 - 1", "0");
    c.certified(
        "Abar*Atildebar = Atildebar*Abar",
        &(&ab * &atb),
        &(&atb * &ab),
        &cert,
        "(1-r)/r x2 k1",
    );
    let cert = imp.combo(&c.sys, "-r^-2 + r^-1", "r^-1 - 1", "0");
    c.certified(
        "A*Atildebar = Atildebar*A",
        &(&a * &atb),
        &(&atb * &a),
        &cert,
        "-(1-r)/r^2 x1 k2 + (1-r)/r x2 k1",
    );

    c.both(
        "dt*d = r*d*dt",
        &w(c, &[dt.clone(), d.clone()]),
        &c.cw("r", &[d.clone(), dt.clone()]),
    );
    c.both(
        "dtbar*dbar = r*dbar*dtbar",
        &w(c, &[dtb.clone(), db.clone()]),
        &c.cw("r", &[db.clone(), dtb.clone()]),
    );
    c.both(
        "dt*dbar = dbar*dt",
        &w(c, &[dt.clone(), db.clone()]),
        &w(c, &[db.clone(), dt.clone()]),
    );
    c.both(
        "dtbar*d = r^2*d*dtbar",
        &w(c, &[dtb.clone(), d.clone()]),
        &c.cw("r^2", &[d.clone(), dtb.clone()]),
    );
    c.control(
        "printed: dtbar*d = r^2*dbar*dtbar",
        &w(c, &[dtb.clone(), d.clone()]),
        &c.cw("r^2", &[db, dtb]),
        "the printed right-hand side has dbar in place of d",
    );
    Ok(())
}

/// Commutation factors of `D = Y11 Y22` and `Dbar = Y22` with `a`, `a*`
/// against those of `A`, `Abar` with `z`, `zbar`.
pub fn verify_subgroup_isomorphism() -> Result<VerificationReport, NcError> {
    let sub = RewriteSystem::subgroup()?;
    let plane = RewriteSystem::dilatation_plane()?;
    let [a, s, y1, y2] = ["a", "a*", "Y11", "Y22"].map(Generator::abs);
    let dd = sub.word(&[y1.clone(), y2.clone()]);
    let ddb = sub.word(&[y2]);
    let pa = plane.gen(Generator::abs("A"));
    let pab = plane.gen(Generator::abs("Abar"));
    let mut report = VerificationReport::new("subgroup_isomorphism");

    // factor c with X g = c g X, from normal forms
    let factor = |sys: &RewriteSystem,
                  x: &NCElement,
                  g: &NCElement|
     -> Result<crate::scalars::LaurentPoly, NcError> {
        let left = sys.normal_form(&(x * g))?;
        let right = sys.normal_form(&(g * x))?;
        let (cr, wr) = right
            .as_monomial()
            .ok_or_else(|| NcError::NotRealizable(right.to_string()))?;
        let cl = left.coefficient(wr);
        Ok(&cl * &cr.inverse_monomial().expect("monomial"))
    };

    let pairs = [
        ("D", &dd, "a", &a, &pa, 1),
        ("D", &dd, "a*", &s, &pa, 2),
        ("Dbar", &ddb, "a", &a, &pab, 1),
        ("Dbar", &ddb, "a*", &s, &pab, 2),
    ];
    for (xn, x, gn, g, px, zi) in pairs {
        let ge = sub.gen(g.clone());
        let pz = plane.gen(Generator::Coord(zi));
        let c_sub = factor(&sub, x, &ge)?;
        let c_plane = factor(&plane, px, &pz)?;
        let c_plane = c_plane.embed(sub.universe()).expect("same universe");
        report.push(
            Entry::exact(format!("{xn}*{gn}: factor"), &[], &(&c_sub - &c_plane))
                .with_note(format!("factor {c_sub}")),
        );
        let res = sub.normal_form(&(&(x * &ge) - (&(&ge * x).scale(&c_sub))))?;
        report.push(res.residual_entry(format!("{xn}*{gn} - ({c_sub})*{gn}*{xn}"), &[]));
    }
    report.push(sub.commutator(&dd, &ddb)?.residual_entry("[D, Dbar]", &[]));
    report.push(
        plane
            .commutator(&pa, &pab)?
            .residual_entry("[A, Abar]", &[]),
    );
    Ok(report)
}
