//! Random well-typed instances of the gs-monoidal axioms, as pairs of
//! diagrams that must denote the same function and the same approximation.

use fixcheck_core::diagram::Diagram;
use fixcheck_core::scalar::Scalar;
use fixcheck_core::set::{Carrier, FiniteSet};
use rand::Rng;

use super::Gen;

pub const AXIOMS: [&str; 15] = [
    "tensor functoriality",
    "identity of a tensor",
    "tensor associativity",
    "tensor unit",
    "symmetry naturality",
    "symmetry on the unit",
    "symmetry involution",
    "symmetry on a tensor",
    "discharger on the unit",
    "duplicator on the unit",
    "duplicator coassociativity",
    "duplicator counit",
    "duplicator cocommutativity",
    "discharger on a tensor",
    "duplicator on a tensor",
];

fn seq<T: Scalar>(f: Diagram<T>, g: Diagram<T>) -> Diagram<T> {
    Diagram::seq(f, g).expect("well-typed")
}

fn ten<T: Scalar>(f: Diagram<T>, g: Diagram<T>) -> Diagram<T> {
    Diagram::tensor(f, g).expect("tensors always typecheck")
}

fn sum(a: &Carrier, b: &Carrier) -> Carrier {
    FiniteSet::sum(a, b).expect("sums are tagged")
}

impl<T: Scalar> Gen<T> {
    fn small(&mut self, input: &Carrier, output: &Carrier) -> Diagram<T> {
        let depth = self.rng.gen_range(0..=2);
        self.diagram(depth, input, output)
    }

    /// Both sides of axiom `AXIOMS[which]` on fresh random carriers and diagrams.
    pub fn axiom(&mut self, which: usize) -> (Diagram<T>, Diagram<T>) {
        let e = FiniteSet::empty();
        let (a, b, c) = (self.carrier(), self.carrier(), self.carrier());
        match which {
            0 => {
                let (a2, b2, c2) = (self.carrier(), self.carrier(), self.carrier());
                let (f, f2) = (self.small(&a, &b), self.small(&a2, &b2));
                let (g, g2) = (self.small(&b, &c), self.small(&b2, &c2));
                let lhs = seq(ten(f.clone(), f2.clone()), ten(g.clone(), g2.clone()));
                (lhs, ten(seq(f, g), seq(f2, g2)))
            }
            1 => (Diagram::id(&sum(&a, &b)), ten(Diagram::id(&a), Diagram::id(&b))),
            2 => {
                let (d, e2, f3) = (self.carrier(), self.carrier(), self.carrier());
                let (f, g, h) = (self.small(&a, &d), self.small(&b, &e2), self.small(&c, &f3));
                (ten(ten(f.clone(), g.clone()), h.clone()), ten(f, ten(g, h)))
            }
            3 => {
                let f = self.small(&a, &b);
                if self.rng.gen_bool(0.5) {
                    (ten(f.clone(), Diagram::id(&e)), f)
                } else {
                    (ten(Diagram::id(&e), f.clone()), f)
                }
            }
            4 => {
                let (a2, b2) = (self.carrier(), self.carrier());
                let (f, f2) = (self.small(&a, &b), self.small(&a2, &b2));
                let lhs = seq(Diagram::sym(&a, &a2).unwrap(), ten(f2.clone(), f.clone()));
                (lhs, seq(ten(f, f2), Diagram::sym(&b, &b2).unwrap()))
            }
            5 => (Diagram::sym(&e, &e).unwrap(), Diagram::id(&e)),
            6 => (seq(Diagram::sym(&a, &b).unwrap(), Diagram::sym(&b, &a).unwrap()), Diagram::id(&sum(&a, &b))),
            7 => {
                let rhs = seq(
                    ten(Diagram::id(&a), Diagram::sym(&b, &c).unwrap()),
                    ten(Diagram::sym(&a, &c).unwrap(), Diagram::id(&b)),
                );
                (Diagram::sym(&sum(&a, &b), &c).unwrap(), rhs)
            }
            8 => (Diagram::disch(&e), Diagram::id(&e)),
            9 => (Diagram::dup(&e).unwrap(), Diagram::id(&e)),
            10 => {
                let dup = || Diagram::dup(&a).unwrap();
                (seq(dup(), ten(Diagram::id(&a), dup())), seq(dup(), ten(dup(), Diagram::id(&a))))
            }
            11 => (Diagram::id(&a), seq(Diagram::dup(&a).unwrap(), ten(Diagram::id(&a), Diagram::disch(&a)))),
            12 => (seq(Diagram::dup(&a).unwrap(), Diagram::sym(&a, &a).unwrap()), Diagram::dup(&a).unwrap()),
            13 => (Diagram::disch(&sum(&a, &b)), ten(Diagram::disch(&a), Diagram::disch(&b))),
            _ => {
                let swap = ten(ten(Diagram::id(&a), Diagram::sym(&a, &b).unwrap()), Diagram::id(&b));
                let lhs = seq(ten(Diagram::dup(&a).unwrap(), Diagram::dup(&b).unwrap()), swap);
                (lhs, Diagram::dup(&sum(&a, &b)).unwrap())
            }
        }
    }

    /// Compares both sides at a random input and a random subset of its
    /// support; `Err` describes the first disagreement.
    pub fn axiom_agrees(&mut self, lhs: &Diagram<T>, rhs: &Diagram<T>) -> Result<(), String> {
        if !lhs.input().same_elements(rhs.input()) || !lhs.output().same_elements(rhs.output()) {
            return Err(format!("interfaces differ: {} -> {} vs {} -> {}", lhs.input(), lhs.output(), rhs.input(), rhs.output()));
        }
        let alg = self.alg.clone();
        let a = self.valuation(lhs.input());
        let l = lhs.evaluate(&a, &alg).map_err(|e| e.to_string())?;
        let r = rhs.evaluate(&a.reorder_to(rhs.input()).unwrap(), &alg).map_err(|e| e.to_string())?;
        if l != r.reorder_to(l.domain()).unwrap() {
            return Err(format!("evaluate: {l} vs {r} at {a}"));
        }
        let y = self.subset_of(&a.support_nonzero());
        let l = lhs.approximate(&a, &y, &alg).map_err(|e| e.to_string())?;
        let r = rhs.approximate(&a.reorder_to(rhs.input()).unwrap(), &y, &alg).map_err(|e| e.to_string())?;
        if l != r.reorder_to(l.domain()).unwrap() {
            return Err(format!("approximate: {l} vs {r} at {a}, {y}"));
        }
        Ok(())
    }
}
