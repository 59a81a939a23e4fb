//! Verification suites. A suite is a list of independent jobs; [`run`] spreads
//! the jobs of the requested suites over scoped threads and sorts the checks by id.

use std::time::Instant;

use clap::ValueEnum;
use mvop_core::deformation::{
    finite_diff_check, flows_commute_check, lax_split_residual, lax_vs_lattice, BlockTridiag,
};
use mvop_core::duran_ismail::{
    commutator_expansion_residual, ef_coefficients, ef_ladder_residual, hermite_pearson_ef_closed,
};
use mvop_core::hermite_fast::{
    casimir_check, casimir_commutation, conjugation_checks, h0_closed_form, oscillator_brackets, second_order_d_check,
    FastHermite,
};
use mvop_core::ladder::{
    commutator_checks, dpainleve1_residual, ladder_relative_residual, quartic_string_residual, string_residuals,
    telescoped_sum_residual, zero_coefficient_residual, LadderPair,
};
use mvop_core::numerics::relative_residual;
use mvop_core::oracle::gram_schmidt_family;
use mvop_core::pearson::{
    derivative_expansion, dx_adjoint_check, hrec2_residual, lowering_derivative_commutator, m2_closed_form,
    m2_commutator_residual, pearson_residual,
};
use mvop_core::weights::{
    freud_weight, hermite_alpha_weight, pearson_alpha_parameters, pearson_v_hermite, pearson_v_numeric,
};
use mvop_core::{DiffOp, ExponentialWeight, MatrixPoly, ScalarPoly, DEFAULT_GRID};

use crate::config::{Config, ConfigError};
use crate::report::{check, Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum Suite {
    Ladder,
    String,
    Dpainleve,
    HermiteFast,
    Casimir,
    Pearson,
    Toda,
    Lax,
    DuranIsmail,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Ladder,
        Suite::String,
        Suite::Dpainleve,
        Suite::HermiteFast,
        Suite::Casimir,
        Suite::Pearson,
        Suite::Toda,
        Suite::Lax,
        Suite::DuranIsmail,
    ];

    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

/// A weight to check in place of the built-in families.
#[derive(Clone, Debug)]
pub struct Custom {
    pub config: Config,
    pub weight: ExponentialWeight,
    pub n_max: usize,
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Replaces the default families of `ladder` and `string`, and the `t` of `dpainleve`.
    pub custom: Option<Custom>,
    /// Step of the finite-difference checks in `toda`.
    pub h: f64,
    /// Replaces every tolerance.
    pub tol: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            custom: None,
            h: 1e-4,
            tol: None,
        }
    }
}

impl Options {
    /// `v = x⁴ + s x²`, `A = 0`, `N = 1` is the only weight `dpainleve` accepts.
    fn quartic_t(&self) -> Result<Option<f64>, ConfigError> {
        let Some(c) = &self.custom else { return Ok(None) };
        let w = &c.weight;
        let v = w.potential();
        let quartic = v.degree() == 4
            && v.coeff(4) == 1.0
            && v.coeff(3) == 0.0
            && v.coeff(1) == 0.0
            && w.matrix().dim() == 1
            && w.matrix().max_abs() == 0.0;
        if !quartic {
            return Err(ConfigError(format!(
                "dpainleve needs the scalar weight e^{{-x^4 - s x^2}}, got family {}",
                c.config.family.name()
            )));
        }
        Ok(Some(v.coeff(2)))
    }

    /// Errors that would only show up inside the jobs, surfaced before running.
    pub fn validate(&self, suite: Suite) -> Result<(), ConfigError> {
        if matches!(suite, Suite::Dpainleve) {
            self.quartic_t()?;
        }
        Ok(())
    }
}

type Job<'a> = Box<dyn FnOnce() -> Vec<Check> + Send + 'a>;

/// Runs `suite` (every suite for [`Suite::All`]) and returns the sorted report.
pub fn run(suite: Suite, opts: &Options) -> Report {
    let start = Instant::now();
    let mut jobs: Vec<(String, Job<'_>)> = Vec::new();
    for s in if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    } {
        let name = s.name();
        jobs.extend(suite_jobs(s, opts).into_iter().map(|j| (name.clone(), j)));
    }
    let mut checks: Vec<Check> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|(name, job)| (name, scope.spawn(job))).collect();
        handles
            .into_iter()
            .flat_map(|(name, h)| {
                h.join()
                    .unwrap_or_else(|_| vec![check(format!("{name}.panic"), 0, 0.0, |_| Err("check thread panicked"))])
            })
            .collect()
    });
    if let Some(tol) = opts.tol {
        for c in &mut checks {
            c.tolerance = tol;
            c.pass = !c.max_residual.is_nan() && c.max_residual < tol;
        }
    }
    Report::new(suite.name(), checks, start.elapsed().as_secs_f64() * 1e3)
}

fn suite_jobs(suite: Suite, opts: &Options) -> Vec<Job<'_>> {
    match suite {
        Suite::Ladder => cases(opts)
            .into_iter()
            .map(|c| boxed(move || ladder_checks(&c)))
            .collect(),
        Suite::String => cases(opts)
            .into_iter()
            .map(|c| boxed(move || string_checks(&c)))
            .collect(),
        Suite::Dpainleve => {
            let ts = match opts.quartic_t() {
                Ok(Some(t)) => vec![t],
                Ok(None) => vec![0.0, 1.0],
                Err(e) => return vec![boxed(move || vec![check("dpainleve.config", 3, 1e-6, |_| Err(e))])],
            };
            ts.into_iter().map(|t| boxed(move || dpainleve_checks(t))).collect()
        }
        Suite::HermiteFast => {
            let mut jobs = vec![boxed(scalar_oracle_checks), boxed(fast_speed_check), boxed(h0_checks)];
            for alpha in [vec![1.0, 0.7], vec![1.0, 1.3, 0.6]] {
                jobs.push(boxed(move || fast_agreement_checks(&alpha)));
            }
            jobs
        }
        Suite::Casimir => [vec![1.0, 0.7], vec![1.0, 1.0]]
            .into_iter()
            .map(|alpha| boxed(move || casimir_checks(&alpha)))
            .collect(),
        Suite::Pearson => vec![
            boxed(pearson_oracle_checks),
            boxed(pearson_fast_checks),
            boxed(pearson_cubic_checks),
        ],
        Suite::Toda => {
            let h = opts.h;
            vec![boxed(move || toda_checks(h)), boxed(move || vec![flows_commute(1e-3)])]
        }
        Suite::Lax => vec![
            boxed(|| lax_checks("hermite-n2", &hermite_alpha_weight(&[1.0, 0.8]), 16, 10)),
            boxed(|| lax_checks("freud-n2", &freud_weight(2, 1.0, 1.0, 0.0), 20, 11)),
        ],
        Suite::DuranIsmail => vec![boxed(ef_hermite_checks), boxed(ef_freud_checks), boxed(cd_checks)],
        Suite::All => Suite::EACH.iter().flat_map(|&s| suite_jobs(s, opts)).collect(),
    }
}

fn boxed<'a>(f: impl FnOnce() -> Vec<Check> + Send + 'a) -> Job<'a> {
    Box::new(f)
}

/// Turns a setup failure into a single failing check.
fn guarded(id: &str, anchor: usize, body: impl FnOnce() -> mvop_core::Result<Vec<Check>>) -> Vec<Check> {
    body().unwrap_or_else(|e| vec![check(format!("{id}.setup"), anchor, 0.0, |_| Err(e))])
}

struct Case {
    label: String,
    weight: mvop_core::Result<ExponentialWeight>,
    n_fam: usize,
}

fn cases(opts: &Options) -> Vec<Case> {
    if let Some(c) = &opts.custom {
        return vec![Case {
            label: c.config.family.name().to_string(),
            weight: Ok(c.weight.clone()),
            n_fam: c.n_max,
        }];
    }
    let case = |label: &str, weight, n_fam| Case {
        label: label.to_string(),
        weight,
        n_fam,
    };
    vec![
        case("hermite-n1", hermite_alpha_weight(&[1.0]), 12),
        case("hermite-n2", hermite_alpha_weight(&[1.0, 1.0]), 12),
        case("freud-n1", freud_weight(1, 1.0, 1.0, 0.0), 14),
        case("freud-n2", freud_weight(2, 1.0, 1.0, 0.0), 14),
    ]
}

const N_CHECK: usize = 8;

fn ladder_checks(case: &Case) -> Vec<Check> {
    let id = format!("ladder.{}", case.label);
    guarded(&id, 1, || {
        let w = case.weight.clone()?;
        let fam = gram_schmidt_family(&w, case.n_fam)?;
        let pair = LadderPair::new(&fam, w.potential(), w.ladder_matrix())?;
        let top = N_CHECK.min(pair.n_max());
        let sweep = |down: bool| {
            check(
                format!("{id}.{}", if down { "lowering" } else { "raising" }),
                1,
                1e-8,
                |p| {
                    for n in 0..=top {
                        for x in DEFAULT_GRID {
                            let (d, u) = ladder_relative_residual(&fam, &pair, x, n)?;
                            p.record(n, x, if down { d } else { u });
                        }
                    }
                    Ok::<_, mvop_core::Error>(())
                },
            )
        };
        let samples = fam.polys()[..4.min(fam.polys().len())].to_vec();
        let brackets = check(format!("{id}.brackets"), 1, 1e-8, |p| {
            p.record(
                None,
                None,
                commutator_checks(w.ladder_matrix(), w.potential(), &samples, &DEFAULT_GRID).max(),
            );
            Ok::<_, mvop_core::Error>(())
        });
        Ok(vec![sweep(true), sweep(false), brackets])
    })
}

fn string_checks(case: &Case) -> Vec<Check> {
    let id = format!("string.{}", case.label);
    guarded(&id, 2, || {
        let w = case.weight.clone()?;
        let fam = gram_schmidt_family(&w, case.n_fam)?;
        let (a, v) = (w.ladder_matrix(), w.potential());
        let res = string_residuals(&fam, a, v)?;
        let top = N_CHECK.min(LadderPair::new(&fam, v, a)?.n_max());
        let relations = |first: bool| {
            check(
                format!("{id}.{}", if first { "first" } else { "second" }),
                2,
                1e-8,
                |p| {
                    for r in &res {
                        let (f, s) = r.relative();
                        p.record(r.n, None, if first { f } else { s });
                    }
                    Ok::<_, mvop_core::Error>(())
                },
            )
        };
        let per_n = |name: &str, f: &dyn Fn(usize) -> mvop_core::Result<f64>| {
            check(format!("{id}.{name}"), 2, 1e-8, |p| {
                for n in 0..=top {
                    p.record(n, None, f(n)?);
                }
                Ok::<_, mvop_core::Error>(())
            })
        };
        Ok(vec![
            relations(true),
            relations(false),
            per_n("zero-coefficient", &|n| zero_coefficient_residual(&fam, a, v, n)),
            per_n("telescoped-sum", &|n| telescoped_sum_residual(&fam, a, v, n)),
        ])
    })
}

/// `t` as in `v = x⁴ + t x²`.
fn dpainleve_checks(t: f64) -> Vec<Check> {
    let id = format!("dpainleve.t={t}");
    guarded(&id, 3, || {
        let fam = gram_schmidt_family(&freud_weight(1, 1.0, 1.0, -t)?, 10)?;
        let (_, c) = fam.scalar_recurrence().expect("scalar family");
        let sweep = |name: &str, f: fn(&[f64], f64, usize) -> mvop_core::Result<f64>| {
            check(format!("{id}.{name}"), 3, 1e-6, |p| {
                for n in 1..=6 {
                    p.record(n, None, f(&c, t, n)?);
                }
                Ok::<_, mvop_core::Error>(())
            })
        };
        let mut literal = sweep("literal", dpainleve1_residual);
        if !literal.pass {
            literal.note = Some(format!(
                "n = 4C(C(n-1)+C(n)+C(n+1)+2t) is off by 6tC(n) = {:.6e} at n = {}; \
                 the string relation gives n = 4C(C(n-1)+C(n)+C(n+1)) + 2tC",
                6.0 * t * c[literal.n.unwrap_or(1)],
                literal.n.unwrap_or(1)
            ));
        }
        Ok(vec![literal, sweep("string-relation", quartic_string_residual)])
    })
}

fn scalar_oracle_checks() -> Vec<Check> {
    guarded("oracle.scalar-hermite", 0, || {
        let start = Instant::now();
        let fam = gram_schmidt_family(&hermite_alpha_weight(&[1.0])?, 10)?;
        let seconds = start.elapsed().as_secs_f64();
        let (b, c) = fam.scalar_recurrence().expect("scalar family");
        let sqrt_pi = std::f64::consts::PI.sqrt();
        Ok(vec![
            check("oracle.scalar-hermite.b", 0, 1e-10, |p| {
                for (n, bn) in b.iter().enumerate() {
                    p.record(n, None, bn.abs());
                }
                Ok::<_, mvop_core::Error>(())
            }),
            check("oracle.scalar-hermite.c", 0, 1e-9, |p| {
                for (n, cn) in c.iter().enumerate().skip(1) {
                    let exact = n as f64 / 2.0;
                    p.record(n, None, (cn - exact).abs() / exact);
                }
                Ok::<_, mvop_core::Error>(())
            }),
            check("oracle.scalar-hermite.h0", 0, 1e-12, |p| {
                p.record(0, None, (fam.h(0)?[(0, 0)].re - sqrt_pi).abs() / sqrt_pi);
                Ok::<_, mvop_core::Error>(())
            }),
            check("oracle.scalar-hermite.seconds", 0, 5.0, |p| {
                p.record(None, None, seconds);
                Ok::<_, mvop_core::Error>(())
            }),
        ])
    })
}

fn label(alpha: &[f64]) -> String {
    let parts: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
    format!("alpha=[{}]", parts.join(","))
}

fn fast_agreement_checks(alpha: &[f64]) -> Vec<Check> {
    let id = format!("fast.{}", label(alpha));
    guarded(&id, 4, || {
        let fast = FastHermite::new(alpha, 10)?;
        let fam = gram_schmidt_family(&hermite_alpha_weight(alpha)?, 10)?;
        let (b, c) = fast.recurrence()?;
        Ok(vec![
            check(format!("{id}.assembly"), 4, 1e-8, |p| {
                for n in 0..=10 {
                    for x in DEFAULT_GRID {
                        let got = fast.eval(x, n)?;
                        let expected = fam.eval(x, n as i64)?;
                        p.record(n, x, relative_residual(&(&got - &expected), &[&expected]));
                    }
                }
                Ok::<_, mvop_core::Error>(())
            }),
            check(format!("{id}.norms-and-recurrence"), 4, 1e-8, |p| {
                for n in 0..=10 {
                    let pairs = [(&fast.norms()[n], fam.h(n)?), (&b[n], fam.b(n)?), (&c[n], fam.c(n)?)];
                    for (got, expected) in pairs {
                        p.record(n, None, relative_residual(&(got - expected), &[expected]));
                    }
                }
                Ok::<_, mvop_core::Error>(())
            }),
        ])
    })
}

/// Wall time of building the family and evaluating every `P(x,n)` on the grid.
pub fn timed_paths(alpha: &[f64], n_max: usize) -> mvop_core::Result<(f64, f64, f64)> {
    let start = Instant::now();
    let fam = gram_schmidt_family(&hermite_alpha_weight(alpha)?, n_max)?;
    let mut oracle = Vec::new();
    for n in 0..=n_max {
        for x in DEFAULT_GRID {
            oracle.push(fam.eval(x, n as i64)?);
        }
    }
    let oracle_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let fast = FastHermite::new(alpha, n_max)?;
    let mut values = Vec::new();
    for n in 0..=n_max {
        for x in DEFAULT_GRID {
            values.push(fast.eval(x, n)?);
        }
    }
    let fast_ms = start.elapsed().as_secs_f64() * 1e3;

    let worst = values
        .iter()
        .zip(&oracle)
        .map(|(f, o)| relative_residual(&(f - o), &[o]))
        .fold(0.0, f64::max);
    Ok((oracle_ms, fast_ms, worst))
}

fn fast_speed_check() -> Vec<Check> {
    let alpha = [1.0, 1.3, 0.6];
    vec![check("fast.n3.time-ratio", 4, 1.0, |p| {
        let (oracle_ms, fast_ms, _) = timed_paths(&alpha, 10)?;
        p.record(10, None, fast_ms / oracle_ms);
        p.note(format!("oracle {oracle_ms:.1} ms, fast {fast_ms:.1} ms"));
        Ok::<_, mvop_core::Error>(())
    })]
}

fn h0_checks() -> Vec<Check> {
    [vec![1.0], vec![1.0, 1.0], vec![1.0, 0.7], vec![1.0, 1.3, 0.6]]
        .iter()
        .map(|alpha| {
            check(format!("h0.{}", label(alpha)), 9, 1e-10, |p| {
                let closed = h0_closed_form(alpha, None)?;
                let fam = gram_schmidt_family(&hermite_alpha_weight(alpha)?, 1)?;
                let quad = fam.h(0)?;
                p.record(0, None, relative_residual(&(&closed - quad), &[quad]));
                p.note("closed form carries the factor sqrt(pi) of the Gaussian integral");
                Ok::<_, mvop_core::Error>(())
            })
        })
        .collect()
}

fn casimir_checks(alpha: &[f64]) -> Vec<Check> {
    let id = format!("casimir.{}", label(alpha));
    guarded(&id, 5, || {
        let fam = gram_schmidt_family(&hermite_alpha_weight(alpha)?, 10)?;
        let sweep = |name: &str, f: &dyn Fn(f64, usize) -> mvop_core::Result<f64>| {
            check(format!("{id}.{name}"), 5, 1e-8, |p| {
                for n in 0..=N_CHECK {
                    for x in DEFAULT_GRID {
                        p.record(n, x, f(x, n)?);
                    }
                }
                Ok::<_, mvop_core::Error>(())
            })
        };
        let samples = fam.polys()[..4].to_vec();
        Ok(vec![
            sweep("eigen-equation", &|x, n| {
                Ok(second_order_d_check(&fam, alpha, x, n)?.relative())
            }),
            sweep("difference-vs-differential", &|x, n| {
                Ok(casimir_check(&fam, alpha, x, n)?.relative())
            }),
            sweep("commutes-with-eigenvalue", &|x, n| {
                let (coeff, applied) = casimir_commutation(&fam, alpha, x, n)?;
                Ok(coeff.max(applied))
            }),
            sweep("conjugated-forms", &|x, n| {
                Ok(conjugation_checks(&fam, alpha, x, n)?.max())
            }),
            check(format!("{id}.brackets"), 5, 1e-8, |p| {
                p.record(None, None, oscillator_brackets(alpha, &samples, &DEFAULT_GRID));
                Ok::<_, mvop_core::Error>(())
            }),
        ])
    })
}

fn pearson_oracle_checks() -> Vec<Check> {
    let id = "pearson.n2";
    guarded(id, 6, || {
        let alpha = pearson_alpha_parameters(2);
        let w = hermite_alpha_weight(&alpha)?;
        let v = pearson_v_hermite(&alpha)?;
        let fam = gram_schmidt_family(&w, 10)?;
        let m2 = m2_closed_form(fam.norms(), w.matrix())?;
        let a = w.matrix();
        let run = |name: &str, tol: f64, body: &dyn Fn(&mut crate::report::Probe) -> mvop_core::Result<()>| {
            check(format!("{id}.{name}"), 6, tol, |p| body(p))
        };
        Ok(vec![
            run("weight-equation", 1e-10, &|p| {
                for x in DEFAULT_GRID {
                    p.record(None, x, pearson_residual(&w, &v, x));
                }
                Ok(())
            }),
            run("m2-closed-vs-projection", 1e-8, &|p| {
                for (n, m2n) in m2.iter().enumerate().take(N_CHECK + 1).skip(1) {
                    let e = derivative_expansion(&fam, 2, n)?;
                    p.record(n, None, e.tail);
                    if let Some(got) = e.coeff(2) {
                        p.record(n, None, relative_residual(&(got - m2n), &[got, m2n]));
                    }
                }
                Ok(())
            }),
            run("m2-commutator", 1e-7, &|p| {
                for n in 2..=N_CHECK {
                    p.record(n, None, m2_commutator_residual(fam.norms(), a, n)?.relative());
                }
                Ok(())
            }),
            run("second-order-norm-recursion", 1e-7, &|p| {
                for n in 0..=6 {
                    p.record(n, None, hrec2_residual(fam.norms(), a, n)?.relative());
                }
                Ok(())
            }),
            run("derivative-adjoint", 1e-8, &|p| {
                for n in 0..=6 {
                    for m in 0..=6 {
                        p.record(n, None, dx_adjoint_check(&fam, &v, n, m)?.relative());
                    }
                }
                Ok(())
            }),
            run("lowering-commutes-with-derivative", 1e-8, &|p| {
                let comm = lowering_derivative_commutator(&fam, a)?;
                p.record(None, None, comm.max_difference(&DiffOp::zero(2, comm.n_max()))?);
                Ok(())
            }),
        ])
    })
}

fn pearson_fast_checks() -> Vec<Check> {
    (2..=3)
        .map(|n_dim| {
            check(
                format!("pearson.n{n_dim}.second-order-norm-recursion-fast"),
                6,
                1e-7,
                |p| {
                    let alpha = pearson_alpha_parameters(n_dim);
                    let fast = FastHermite::new(&alpha, 12)?;
                    for n in 0..=10 {
                        p.record(
                            n,
                            None,
                            hrec2_residual(fast.norms(), fast.ladder_matrix(), n)?.relative(),
                        );
                    }
                    let w = hermite_alpha_weight(&alpha)?;
                    let v = pearson_v_hermite(&alpha)?;
                    for x in DEFAULT_GRID {
                        p.record(None, x, pearson_residual(&w, &v, x));
                    }
                    Ok::<_, mvop_core::Error>(())
                },
            )
        })
        .collect()
}

fn pearson_cubic_checks() -> Vec<Check> {
    let id = "pearson.freud-n2";
    guarded(id, 6, || {
        let w = freud_weight(2, 1.0, 1.0, 0.0)?;
        let fam = gram_schmidt_family(&w, 10)?;
        Ok(vec![
            check(format!("{id}.cubic-fit"), 6, 1e-8, |p| {
                // the fit itself rejects residuals above 1e-8 on its verification nodes
                let v = pearson_v_numeric(&w, 3)?;
                for x in DEFAULT_GRID {
                    p.record(None, x, pearson_residual(&w, &v, x));
                }
                Ok::<_, mvop_core::Error>(())
            }),
            check(format!("{id}.expansion-tail"), 6, 1e-8, |p| {
                for n in 3..=N_CHECK {
                    p.record(n, None, derivative_expansion(&fam, 3, n)?.tail);
                }
                Ok::<_, mvop_core::Error>(())
            }),
        ])
    })
}

fn toda_checks(h: f64) -> Vec<Check> {
    let x = ScalarPoly::monomial(1);
    let x2 = ScalarPoly::monomial(2);
    let cases: [(&str, mvop_core::Result<ExponentialWeight>, &ScalarPoly, f64); 4] = [
        ("toda.hermite-n1.toda", hermite_alpha_weight(&[1.0]), &x, 0.3),
        ("toda.hermite-n2.toda", hermite_alpha_weight(&[1.0, 1.0]), &x, 0.0),
        ("toda.quartic.langmuir", freud_weight(1, 1.0, 1.0, 0.0), &x2, 0.5),
        ("toda.freud-n2.langmuir", freud_weight(2, 1.0, 1.0, 0.0), &x2, 0.0),
    ];
    cases
        .into_iter()
        .map(|(id, w, vdot, t)| {
            check(id, 7, 1e-6, |p| {
                let r = finite_diff_check(&w?, vdot, t, h, 6)?;
                p.record(None, None, r.max());
                p.note(format!("central differences with h = {h:e}"));
                Ok::<_, mvop_core::Error>(())
            })
        })
        .collect()
}

fn flows_commute(h: f64) -> Check {
    check("toda.freud-n2.flows-commute", 7, 1e-5, |p| {
        let w = freud_weight(2, 1.0, 1.0, 0.0)?;
        let r = flows_commute_check(&w, &ScalarPoly::monomial(1), &ScalarPoly::monomial(2), h, 5)?;
        p.record(None, None, r);
        p.note(format!("central differences with h = {h:e}"));
        Ok::<_, mvop_core::Error>(())
    })
}

fn lax_checks(name: &str, w: &mvop_core::Result<ExponentialWeight>, n_fam: usize, n_blocks: usize) -> Vec<Check> {
    let id = format!("lax.{name}");
    guarded(&id, 7, || {
        let fam = gram_schmidt_family(&w.clone()?, n_fam)?;
        let l = BlockTridiag::from_family(&fam, n_blocks)?;
        let mut out = Vec::new();
        for j in 1..=4 {
            out.push(check(format!("{id}.j{j}.vs-lattice"), 7, 1e-8, |p| {
                p.record(None, None, lax_vs_lattice(&fam, j, 6)?);
                Ok::<_, mvop_core::Error>(())
            }));
            out.push(check(format!("{id}.j{j}.split"), 7, 1e-10, |p| {
                p.record(None, None, lax_split_residual(&l, j)?);
                Ok::<_, mvop_core::Error>(())
            }));
        }
        Ok(out)
    })
}

fn ef_hermite_checks() -> Vec<Check> {
    let id = "duran-ismail.pearson-n2";
    guarded(id, 8, || {
        let alpha = pearson_alpha_parameters(2);
        let w = hermite_alpha_weight(&alpha)?;
        let v = pearson_v_hermite(&alpha)?;
        let fam = gram_schmidt_family(&w, 8)?;
        let sweep = |name: &str, tol: f64, f: &dyn Fn(f64, usize) -> mvop_core::Result<f64>| {
            check(format!("{id}.{name}"), 8, tol, |p| {
                for n in 1..=6 {
                    for x in DEFAULT_GRID {
                        p.record(n, x, f(x, n)?);
                    }
                }
                Ok::<_, mvop_core::Error>(())
            })
        };
        Ok(vec![
            sweep("ef-ladder", 1e-8, &|x, n| {
                let (e, f) = ef_coefficients(&fam, &v, x, n)?;
                Ok(ef_ladder_residual(&fam, &e, &f, x, n)?.relative())
            }),
            sweep("ef-closed-forms", 1e-7, &|x, n| {
                let (e, f) = ef_coefficients(&fam, &v, x, n)?;
                let (ec, fc) = hermite_pearson_ef_closed(fam.norms(), w.matrix(), x, n)?;
                let scale = e.frobenius_norm().max(f.frobenius_norm()).max(1.0);
                Ok((&ec - &e).frobenius_norm().max((&fc - &f).frobenius_norm()) / scale)
            }),
            sweep("commutator-expansion", 1e-7, &|x, n| {
                Ok(commutator_expansion_residual(&fam, &w, x, n)?.relative())
            }),
        ])
    })
}

fn ef_freud_checks() -> Vec<Check> {
    vec![check("duran-ismail.freud-n2.ef-ladder", 8, 1e-8, |p| {
        let w = freud_weight(2, 1.0, 1.0, 0.0)?;
        let v: MatrixPoly = pearson_v_numeric(&w, 3)?;
        let fam = gram_schmidt_family(&w, 8)?;
        for n in 1..=6 {
            for x in DEFAULT_GRID {
                let (e, f) = ef_coefficients(&fam, &v, x, n)?;
                p.record(n, x, ef_ladder_residual(&fam, &e, &f, x, n)?.relative());
            }
        }
        Ok::<_, mvop_core::Error>(())
    })]
}

fn cd_checks() -> Vec<Check> {
    type Weight = fn() -> mvop_core::Result<ExponentialWeight>;
    let weights: [(&str, Weight); 2] = [
        ("pearson-n2", || hermite_alpha_weight(&pearson_alpha_parameters(2))),
        ("freud-n2", || freud_weight(2, 1.0, 1.0, 0.0)),
    ];
    weights
        .into_iter()
        .map(|(name, w)| {
            check(format!("duran-ismail.{name}.christoffel-darboux"), 8, 1e-8, |p| {
                let fam = gram_schmidt_family(&w()?, 10)?;
                for n in 1..=N_CHECK {
                    for (i, x) in DEFAULT_GRID.into_iter().enumerate() {
                        let y = DEFAULT_GRID[(i + 3) % DEFAULT_GRID.len()];
                        p.record(n, x, fam.christoffel_darboux_residual(x, y, n)?);
                    }
                }
                Ok::<_, mvop_core::Error>(())
            })
        })
        .collect()
}

/// Identity used by `compute`: the largest three-term recurrence residual on the grid.
pub fn recurrence_summary(fam: &mvop_core::MvopFamily) -> mvop_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..fam.n_max() {
        for x in DEFAULT_GRID {
            worst = worst.max(fam.recurrence_residual(x, n)?);
        }
    }
    Ok(worst)
}
