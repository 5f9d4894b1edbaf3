//! Built-in catalog of named groups with hand-checked ground truth.

use crate::abelian::AbelianInvariants;
use crate::expr::GroupExpr;
use crate::word::Word;

pub const CATALOG_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    /// Where the expected values come from.
    pub provenance: &'static str,
    pub expr: GroupExpr,
    pub abelianization: AbelianInvariants,
    /// Primes at which every kernel must have margin at least `min_margin`.
    pub primes: &'static [u64],
    pub min_margin: i64,
    /// Lower bound on `rk_Q(U)` over all kernels at `primes`, when known.
    pub min_subgroup_rank: Option<usize>,
}

fn word(g: &GroupExpr, s: &str) -> Word {
    Word::parse(s, g.presentation().alphabet()).expect("catalog word")
}

fn f(n: usize) -> GroupExpr {
    GroupExpr::free(n).expect("catalog group")
}

fn z(n: usize) -> GroupExpr {
    GroupExpr::free_abelian(n).expect("catalog group")
}

/// `F_2 ⋆_{v = v} F_2` with `v = a^2 b a^-1 b^-1`.
pub fn double() -> GroupExpr {
    let v = word(&f(2), "a^2 b a^-1 b^-1");
    GroupExpr::cyclic_amalgam(f(2), f(2), v.clone(), v).expect("catalog group")
}

/// `<a, b, c, d | a^2 b^2 = c^2 d^2>`, split along `a^2 b^2`.
pub fn nonorientable_genus_four() -> GroupExpr {
    let w = word(&f(2), "a^2 b^2");
    GroupExpr::cyclic_amalgam(f(2), f(2), w.clone(), w).expect("catalog group")
}

/// `F_2 ⋆_<v> (<v> × Z)` with `v = a^2 b a^-1 b^-1`.
pub fn extension() -> GroupExpr {
    let v = word(&f(2), "a^2 b a^-1 b^-1");
    GroupExpr::ext_centralizer(f(2), v, 1).expect("catalog group")
}

pub fn catalog() -> Vec<Fixture> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(Fixture {
            name: ["free2", "free3", "free4"][n - 2],
            description: "free group",
            provenance: "Nielsen-Schreier: every kernel is free of rank p(n-1)+1",
            expr: f(n),
            abelianization: AbelianInvariants::new(n, []),
            primes: &[2, 3, 5],
            min_margin: 1,
            min_subgroup_rank: None,
        });
    }
    for n in 2..=3 {
        out.push(Fixture {
            name: ["abelian2", "abelian3"][n - 2],
            description: "free abelian group; finite-index subgroups are isomorphic to it",
            provenance: "index-p subgroups of Z^n are Z^n",
            expr: z(n),
            abelianization: AbelianInvariants::new(n, []),
            primes: &[2, 3],
            min_margin: 0,
            min_subgroup_rank: None,
        });
    }
    out.push(Fixture {
        name: "ext-f2",
        description: "extension of the centralizer of a^2 b a^-1 b^-1 in F2 by Z",
        provenance: "<a,b,t | [t, a^2 b a^-1 b^-1]>: the relator is a commutator, so H_1 = Z^3 and d(G) = 3",
        expr: extension(),
        abelianization: AbelianInvariants::new(3, []),
        primes: &[2, 3],
        min_margin: 1,
        min_subgroup_rank: Some(4),
    });
    out.push(Fixture {
        name: "double",
        description: "double of F2 along a^2 b a^-1 b^-1",
        provenance: "abelianization Z^3 while the group needs 4 generators; every index-p normal subgroup has rational rank at least 5",
        expr: double(),
        abelianization: AbelianInvariants::new(3, []),
        primes: &[2, 3],
        min_margin: 2,
        min_subgroup_rank: Some(5),
    });
    out.push(Fixture {
        name: "n4-surface",
        description: "fundamental group of the closed nonorientable surface of genus 4",
        provenance: "<a,b,c,d | a^2 b^2 = c^2 d^2> abelianizes to Z^3 x Z/2",
        expr: nonorientable_genus_four(),
        abelianization: AbelianInvariants::new(3, [2]),
        primes: &[2, 3, 5],
        min_margin: 1,
        min_subgroup_rank: None,
    });
    out.push(Fixture {
        name: "surface2",
        description: "closed orientable surface group of genus 2 as F2 amalgamated with F2 over [a,b]",
        provenance: "H_1 = Z^4; index-p subgroups are genus p+1 surface groups of rank 2p+2",
        expr: {
            let c = word(&f(2), "a b a^-1 b^-1");
            GroupExpr::cyclic_amalgam(f(2), f(2), c.clone(), c).expect("catalog group")
        },
        abelianization: AbelianInvariants::new(4, []),
        primes: &[2, 3],
        min_margin: 2,
        min_subgroup_rank: None,
    });
    out.push(Fixture {
        name: "hnn-ab",
        description: "HNN extension of F2 conjugating a to b",
        provenance: "<a,b,t | t a t^-1 = b>: the relation identifies a with b in H_1, which is Z^2",
        expr: GroupExpr::cyclic_hnn(f(2), word(&f(2), "a"), word(&f(2), "b")).expect("catalog group"),
        abelianization: AbelianInvariants::new(2, []),
        primes: &[2, 3],
        min_margin: 1,
        min_subgroup_rank: None,
    });
    out.push(Fixture {
        name: "hnn-aa",
        description: "HNN extension of F2 centralizing a, isomorphic to the extension of the centralizer of a",
        provenance: "<a,b,t | [t,a]>: relator has zero exponent sums, H_1 = Z^3",
        expr: GroupExpr::cyclic_hnn(f(2), word(&f(2), "a"), word(&f(2), "a")).expect("catalog group"),
        abelianization: AbelianInvariants::new(3, []),
        primes: &[2, 3],
        min_margin: 1,
        min_subgroup_rank: None,
    });
    out.push(Fixture {
        name: "product",
        description: "free product of Z^2 and F3",
        provenance: "rational rank is additive over free products: 2 + 3",
        expr: GroupExpr::free_product(z(2), f(3)).expect("catalog group"),
        abelianization: AbelianInvariants::new(5, []),
        primes: &[2, 3],
        min_margin: 1,
        min_subgroup_rank: None,
    });
    out
}

pub fn find(name: &str) -> Option<Fixture> {
    catalog().into_iter().find(|f| f.name == name)
}
