//! Fixture checks and randomized property suites shared by the CLI
//! `selftest` command and the acceptance test target.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{abelian_invariants, AbelianInvariants};
use crate::cases::{case_rank_audit, hnn_sandwich, CaseError, CaseTag};
use crate::corpus::{CorpusConfig, TreeGenerator};
use crate::expr::GroupExpr;
use crate::fixtures::{self, Fixture};
use crate::rank::{nielsen_schreier_rank, structural_rank, verify_theorem_a_with, InvariantsFn};
use crate::subgroup::{enumerate_index_p_kernels, subgroup_presentation};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub trees: usize,
    pub splittings: usize,
    pub extensions: usize,
}

impl Scale {
    pub const FULL: Scale = Scale {
        trees: 500,
        splittings: 500,
        extensions: 100,
    };
    pub const REDUCED: Scale = Scale {
        trees: 120,
        splittings: 80,
        extensions: 30,
    };
}

#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub invariants: InvariantsFn,
    pub seed: u64,
    pub scale: Scale,
    pub config: CorpusConfig,
}

impl Context {
    pub fn new(seed: u64, scale: Scale) -> Self {
        Self {
            invariants: abelian_invariants,
            seed,
            scale,
            config: CorpusConfig::default(),
        }
    }

    fn trees(&self) -> Vec<GroupExpr> {
        let mut g = TreeGenerator::new(self.seed, self.config);
        (0..self.scale.trees).map(|_| g.tree()).collect()
    }

    fn splittings(&self) -> Vec<GroupExpr> {
        let mut g = TreeGenerator::new(self.seed.wrapping_add(1), self.config);
        (0..self.scale.splittings).map(|_| g.splitting()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Number of instances examined.
    pub instances: usize,
    pub failed: usize,
    /// The first few failure messages.
    pub failures: Vec<String>,
    pub detail: String,
    #[serde(serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

struct Tally {
    name: &'static str,
    start: Instant,
    instances: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            start: Instant::now(),
            instances: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 20 {
                self.failures.push(failure());
            }
        }
    }

    fn finish(self, detail: String) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            passed: self.failed == 0,
            instances: self.instances,
            failed: self.failed,
            failures: self.failures,
            detail,
            elapsed: self.start.elapsed(),
        }
    }
}

fn fixture_kernel_ranks(ctx: &Context, fx: &Fixture, p: u64) -> Result<Vec<usize>, String> {
    let g = fx.expr.presentation();
    let homs = enumerate_index_p_kernels(g, p).map_err(|e| e.to_string())?;
    homs.iter()
        .map(|h| {
            subgroup_presentation(g, h)
                .map(|s| (ctx.invariants)(&s.presentation).free_rank)
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn expected_kernel_count(ctx: &Context, fx: &Fixture, p: u64) -> usize {
    let d = (ctx.invariants)(fx.expr.presentation()).dimension_mod_p(p) as u32;
    ((p.pow(d) - 1) / (p - 1)) as usize
}

/// Exact abelianization plus margins at the listed primes for one fixture.
fn fixture_check(ctx: &Context, name: &'static str, fx: &Fixture, expected_kernels: &[(u64, usize)]) -> CheckOutcome {
    let mut t = Tally::new(name);
    let inv = (ctx.invariants)(fx.expr.presentation());
    t.check(inv == fx.abelianization, || {
        format!("{}: abelianization {} expected {}", fx.name, inv, fx.abelianization)
    });
    let rank = inv.free_rank;
    let mut mins = Vec::new();
    for &p in fx.primes {
        match fixture_kernel_ranks(ctx, fx, p) {
            Ok(ranks) => {
                if let Some(&(_, want)) = expected_kernels.iter().find(|(q, _)| *q == p) {
                    t.check(ranks.len() == want, || {
                        format!("{}: {} kernels at p={p}, expected {want}", fx.name, ranks.len())
                    });
                }
                for (label, &r) in ranks.iter().enumerate() {
                    let margin = r as i64 - rank as i64;
                    t.check(margin >= fx.min_margin, || {
                        format!("{}: p={p} kernel {label} has rk_Q(U) = {r}, margin {margin} < {}", fx.name, fx.min_margin)
                    });
                    if let Some(lo) = fx.min_subgroup_rank {
                        t.check(r >= lo, || format!("{}: p={p} kernel {label} has rk_Q(U) = {r} < {lo}", fx.name));
                    }
                }
                mins.push(format!("p={p}: {} kernels, min rk_Q(U) {}", ranks.len(), ranks.iter().min().copied().unwrap_or(0)));
            }
            Err(e) => t.check(false, || format!("{}: {e}", fx.name)),
        }
    }
    t.finish(format!("{} = {}; {}", fx.name, inv, mins.join("; ")))
}

pub fn double_fixture(ctx: &Context) -> CheckOutcome {
    fixture_check(ctx, "double-fixture", &fixtures::find("double").expect("catalog"), &[(2, 7), (3, 13)])
}

pub fn n4_fixture(ctx: &Context) -> CheckOutcome {
    let mut fx = fixtures::find("n4-surface").expect("catalog");
    fx.primes = &[2, 3, 5];
    fixture_check(ctx, "n4-surface-fixture", &fx, &[])
}

pub fn extension_fixture(ctx: &Context) -> CheckOutcome {
    let mut fx = fixtures::find("ext-f2").expect("catalog");
    fx.primes = &[2, 3];
    fixture_check(ctx, "extension-fixture", &fx, &[])
}

pub fn nielsen_schreier(ctx: &Context) -> CheckOutcome {
    let mut t = Tally::new("nielsen-schreier");
    for n in 2..=4usize {
        let fx = fixtures::find(["free2", "free3", "free4"][n - 2]).expect("catalog");
        let g = fx.expr.presentation();
        for p in [2u64, 3, 5] {
            let want = nielsen_schreier_rank(n, p as usize);
            let homs = match enumerate_index_p_kernels(g, p) {
                Ok(h) => h,
                Err(e) => {
                    t.check(false, || format!("{}: {e}", fx.name));
                    continue;
                }
            };
            t.check(homs.len() == expected_kernel_count(ctx, &fx, p), || {
                format!("{}: p={p} enumerated {} kernels", fx.name, homs.len())
            });
            for h in &homs {
                let s = subgroup_presentation(g, h).expect("valid hom");
                let inv = (ctx.invariants)(&s.presentation);
                let ok = s.presentation.generator_count() == want
                    && s.presentation.relator_count() == 0
                    && inv == AbelianInvariants::new(want, []);
                t.check(ok, || {
                    format!(
                        "{}: p={p} kernel {:?}: {} generators, {} relators, abelianization {inv}; expected free of rank {want}",
                        fx.name,
                        h.images,
                        s.presentation.generator_count(),
                        s.presentation.relator_count()
                    )
                });
            }
        }
    }
    t.finish("Free(n), n in 2..=4, p in {2,3,5}".into())
}

pub fn structural_equivalence(ctx: &Context) -> CheckOutcome {
    let mut t = Tally::new("structural-rank");
    let trees = ctx.trees();
    let max_depth = trees.iter().map(GroupExpr::depth).max().unwrap_or(0);
    for e in &trees {
        let s = structural_rank(e);
        let o = (ctx.invariants)(e.presentation()).free_rank;
        t.check(s == o, || format!("{e}: structural {s}, Smith form {o}"));
    }
    t.finish(format!("{} trees, max depth {max_depth}", trees.len()))
}

pub fn theorem_a_sweep(ctx: &Context) -> CheckOutcome {
    let mut t = Tally::new("rank-sweep");
    let trees: Vec<GroupExpr> = ctx.trees().into_iter().filter(|e| !e.is_abelian()).collect();
    let mut kernels = 0usize;
    let mut min_margin = i64::MAX;
    for e in &trees {
        for p in [2u64, 3] {
            match verify_theorem_a_with(e, p, ctx.invariants) {
                Ok(r) => {
                    kernels += r.kernels.len();
                    min_margin = min_margin.min(r.min_margin().unwrap_or(i64::MAX));
                    t.check(true, String::new);
                }
                Err(err) => t.check(false, || format!("{e} at p={p}: {err}")),
            }
        }
    }
    t.finish(format!(
        "{} non-abelian trees, {kernels} kernels, min margin {}",
        trees.len(),
        if min_margin == i64::MAX { 0 } else { min_margin }
    ))
}

pub fn case_machinery(ctx: &Context) -> CheckOutcome {
    let mut t = Tally::new("case-audits");
    let mut counts: BTreeMap<CaseTag, usize> = BTreeMap::new();
    let mut exprs = ctx.splittings();
    exprs.extend(
        fixtures::catalog()
            .into_iter()
            .filter(|f| f.expr.is_one_edge_splitting())
            .map(|f| f.expr),
    );
    let mut hnn = 0;
    for e in &exprs {
        for p in [2u64, 3] {
            let homs = enumerate_index_p_kernels(e.presentation(), p).expect("prime");
            for h in &homs {
                match case_rank_audit(e, h) {
                    Ok(rec) => {
                        *counts.entry(rec.case).or_default() += 1;
                        t.check(rec.case != CaseTag::I2a, || format!("{e}: classified I.2a"));
                    }
                    Err(CaseError::AuditFailure(rec)) => {
                        t.check(false, || format!("{e} at p={p}, hom {:?}: {rec}", h.images));
                    }
                    Err(err) => t.check(false, || format!("{e}: {err}")),
                }
            }
        }
        if let Some((base, rank)) = hnn_sandwich(e) {
            hnn += 1;
            t.check(base <= rank && rank <= base + 1, || {
                format!("{e}: rk_Q(G) = {rank} outside [{base}, {}]", base + 1)
            });
        }
    }
    let seen: Vec<String> = counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    t.finish(format!("{} splittings ({hnn} HNN); {}", exprs.len(), seen.join(" ")))
}

pub fn euler_characteristic(ctx: &Context) -> CheckOutcome {
    let mut t = Tally::new("euler-characteristic");
    let zero = Rational64::from_integer(0);
    let trees = ctx.trees();
    for e in &trees {
        let chi = e.euler_characteristic();
        t.check(chi <= zero && ((chi == zero) == e.is_abelian()), || {
            format!("{e}: chi = {chi}, abelian = {}", e.is_abelian())
        });
    }
    let mut g = TreeGenerator::new(ctx.seed.wrapping_add(2), ctx.config);
    for _ in 0..ctx.scale.extensions {
        let (base, c, m) = g.extension_instance();
        let ext = GroupExpr::ext_centralizer(base.clone(), c, m).expect("accepted instance");
        t.check(ext.euler_characteristic() == base.euler_characteristic(), || {
            format!("{ext}: chi {} differs from base chi {}", ext.euler_characteristic(), base.euler_characteristic())
        });
    }
    t.finish(format!("{} trees, {} extensions", trees.len(), ctx.scale.extensions))
}

/// One entry per acceptance criterion, in order.
pub fn criteria() -> Vec<(&'static str, fn(&Context) -> CheckOutcome, Duration)> {
    vec![
        ("double fixture", double_fixture as fn(&Context) -> CheckOutcome, Duration::from_secs(5)),
        ("nonorientable genus 4 fixture", n4_fixture, Duration::from_secs(5)),
        ("Nielsen-Schreier exactness", nielsen_schreier, Duration::from_secs(10)),
        ("structural vs oracle rank", structural_equivalence, Duration::from_secs(60)),
        ("rank inequality sweep", theorem_a_sweep, Duration::from_secs(120)),
        ("case classification and audits", case_machinery, Duration::from_secs(120)),
        ("Euler characteristic", euler_characteristic, Duration::from_secs(60)),
        ("extension fixture", extension_fixture, Duration::from_secs(5)),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelftestError {
    #[error("fixture catalog is empty")]
    EmptyCatalog,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Every catalog fixture, then every criterion suite.
pub fn run_selftest(catalog: &[Fixture], ctx: &Context) -> Result<Summary, SelftestError> {
    if catalog.is_empty() {
        return Err(SelftestError::EmptyCatalog);
    }
    let mut checks: Vec<CheckOutcome> = catalog
        .iter()
        .map(|fx| fixture_check(ctx, fx.name, fx, &[]))
        .collect();
    checks.extend(criteria().into_iter().map(|(_, f, _)| f(ctx)));
    Ok(Summary {
        seed: ctx.seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{smith_normal_form, IntMatrix};
    use crate::presentation::Presentation;

    /// Smith form that never pivots in the last column.
    fn truncated(p: &Presentation) -> AbelianInvariants {
        let n = p.generator_count();
        let rows: Vec<Vec<i64>> = p
            .relator_vectors()
            .into_iter()
            .map(|r| r[..n - 1].to_vec())
            .collect();
        let rank = smith_normal_form(&IntMatrix::from_rows(&rows, n - 1)).rank;
        AbelianInvariants::new(n - 1 - rank, [])
    }

    #[test]
    fn injected_fault_is_named() {
        let mut ctx = Context::new(1, Scale::REDUCED);
        assert!(nielsen_schreier(&ctx).passed);
        ctx.invariants = truncated;
        let out = nielsen_schreier(&ctx);
        assert!(!out.passed);
        assert!(out.failures[0].starts_with("free2"), "{:?}", out.failures);
    }

    #[test]
    fn empty_catalog() {
        let ctx = Context::new(1, Scale::REDUCED);
        assert_eq!(run_selftest(&[], &ctx).unwrap_err(), SelftestError::EmptyCatalog);
    }
}
