//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

pub mod axioms;

use fixcheck_core::blocks::{Block, Relation};
use fixcheck_core::diagram::Diagram;
use fixcheck_core::distribution::Distribution;
use fixcheck_core::lifting::labels;
use fixcheck_core::mv::{AlgebraKind, MvAlgebra};
use fixcheck_core::scalar::Scalar;
use fixcheck_core::set::{Carrier, FiniteSet};
use fixcheck_core::systems::LabelledMarkovChain;
use fixcheck_core::valuation::{Subset, Valuation};
use fixcheck_core::Rational;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shared atom names, so independently drawn carriers overlap and sums get
/// tagged elements.
const POOL: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

pub struct Gen<T: Scalar> {
    pub rng: ChaCha8Rng,
    pub alg: MvAlgebra<T>,
    pub max_carrier: usize,
    /// Largest denominator of sampled values on the real interval.
    pub max_denominator: i64,
}

impl Gen<i64> {
    pub fn chain(seed: u64, k: u64) -> Self {
        Gen::new(seed, MvAlgebra::chain(k).unwrap())
    }
}

impl Gen<Rational> {
    pub fn unit(seed: u64) -> Self {
        Gen::new(seed, MvAlgebra::unit_interval())
    }
}

impl<T: Scalar> Gen<T> {
    pub fn new(seed: u64, alg: MvAlgebra<T>) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), alg, max_carrier: 5, max_denominator: 12 }
    }

    pub fn value(&mut self) -> T {
        let k = self.alg.scale() as i64;
        let den = match self.alg.kind() {
            AlgebraKind::FiniteChain => 1,
            AlgebraKind::RealInterval => self.rng.gen_range(1..=self.max_denominator),
        };
        let num = self.rng.gen_range(0..=k * den);
        T::from_ratio(&q(num, den)).expect("chain values are integers")
    }

    pub fn carrier_of_size(&mut self, n: usize) -> Carrier {
        let mut names = POOL.to_vec();
        names.shuffle(&mut self.rng);
        FiniteSet::atoms(&names[..n]).unwrap()
    }

    pub fn carrier(&mut self) -> Carrier {
        let n = self.rng.gen_range(1..=self.max_carrier);
        self.carrier_of_size(n)
    }

    /// Possibly empty.
    pub fn any_carrier(&mut self) -> Carrier {
        let n = self.rng.gen_range(0..=self.max_carrier);
        self.carrier_of_size(n)
    }

    pub fn valuation(&mut self, s: &Carrier) -> Valuation<T> {
        let values = (0..s.len()).map(|_| self.value()).collect();
        Valuation::new(s, values).unwrap()
    }

    pub fn subset_of(&mut self, s: &Subset) -> Subset {
        let keep: Vec<usize> = s.indices().filter(|_| self.rng.gen_bool(0.5)).collect();
        Subset::from_indices(s.domain(), keep)
    }

    pub fn subset(&mut self, s: &Carrier) -> Subset {
        self.subset_of(&Subset::full(s))
    }

    /// Weights `n_i/q` with `q ≤ max_denominator` on a random nonempty support.
    pub fn distribution(&mut self, s: &Carrier) -> Distribution<T> {
        let den = self.rng.gen_range(1..=self.max_denominator);
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.shuffle(&mut self.rng);
        let parts = self.rng.gen_range(1..=s.len().min(den as usize));
        let mut cuts: Vec<i64> = (1..den).collect();
        cuts.shuffle(&mut self.rng);
        let mut cuts: Vec<i64> = cuts[..parts - 1].to_vec();
        cuts.sort_unstable();
        cuts.insert(0, 0);
        cuts.push(den);
        let weights = cuts
            .windows(2)
            .zip(idx)
            .map(|(w, i)| (i, T::from_ratio(&q(w[1] - w[0], den)).expect("field scalar")));
        Distribution::new(s, weights).unwrap()
    }

    pub fn relation(&mut self, input: &Carrier, output: &Carrier) -> Relation {
        let density = self.rng.gen_range(0.0..0.8);
        let mut pairs = Vec::new();
        for y in 0..input.len() {
            for z in 0..output.len() {
                if self.rng.gen_bool(density) {
                    pairs.push((y, z));
                }
            }
        }
        Relation::new(input, output, pairs)
    }

    fn expect_allowed(&self) -> bool {
        self.alg.is_unit_interval() && T::is_field()
    }

    /// One basic block (constants are fed by a discharger) from `input` to
    /// `output`.
    pub fn block(&mut self, input: &Carrier, output: &Carrier) -> Diagram<T> {
        loop {
            match self.rng.gen_range(0..7) {
                0 => {
                    let k = self.valuation(output);
                    let c = Diagram::block(Block::constant(&FiniteSet::empty(), k));
                    return Diagram::seq(Diagram::disch(input), c).unwrap();
                }
                1 if !input.is_empty() || output.is_empty() => {
                    let g = (0..output.len()).map(|_| self.rng.gen_range(0..input.len())).collect();
                    return Diagram::block(Block::reindex(input, output, g).unwrap());
                }
                2 => return Diagram::block(Block::min_rel(self.relation(input, output))),
                3 => return Diagram::block(Block::max_rel(self.relation(input, output))),
                4 if input.same_elements(output) => {
                    let w = self.valuation(input);
                    return Diagram::block(Block::add(w));
                }
                5 if input.same_elements(output) => {
                    let w = self.valuation(input);
                    return Diagram::block(Block::sub(w));
                }
                6 if self.expect_allowed() && !input.is_empty() => {
                    let ps = (0..output.len()).map(|_| self.distribution(input)).collect();
                    return Diagram::block(Block::expect(input, output, ps).unwrap());
                }
                _ => {}
            }
        }
    }

    /// A composite of nesting depth at most `depth`, built from blocks,
    /// sequencing, duplication, tensors and symmetries.
    pub fn diagram(&mut self, depth: usize, input: &Carrier, output: &Carrier) -> Diagram<T> {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.block(input, output);
        }
        match self.rng.gen_range(0..3) {
            0 => {
                let mid = self.carrier();
                let f = self.diagram(depth - 1, input, &mid);
                let g = self.diagram(depth - 1, &mid, output);
                Diagram::seq(f, g).unwrap()
            }
            _ => {
                let (c1, c2) = (self.carrier(), self.carrier());
                let f = self.diagram(depth - 1, input, &c1);
                let g = self.diagram(depth - 1, input, &c2);
                let mut split = Diagram::seq(Diagram::dup(input).unwrap(), Diagram::tensor(f, g).unwrap()).unwrap();
                if self.rng.gen_bool(0.5) {
                    split = Diagram::seq(split, Diagram::sym(&c1, &c2).unwrap()).unwrap();
                }
                let rel = self.relation(split.output(), output);
                let join = if self.rng.gen_bool(0.5) { Block::min_rel(rel) } else { Block::max_rel(rel) };
                Diagram::seq(split, Diagram::block(join)).unwrap()
            }
        }
    }

    /// An endofunction on a random nonempty carrier.
    pub fn endo(&mut self, depth: usize) -> (Carrier, Diagram<T>) {
        let s = self.carrier();
        let d = self.diagram(depth, &s, &s);
        (s, d)
    }
}

impl Gen<Rational> {
    /// Labels drawn from two letters; states `s0…`.
    pub fn lmc(&mut self, max_states: usize) -> LabelledMarkovChain<Rational> {
        let n = self.rng.gen_range(1..=max_states);
        let states = FiniteSet::atoms((0..n).map(|i| format!("s{i}"))).unwrap();
        let ls = labels((0..n).map(|_| if self.rng.gen_bool(0.7) { "A" } else { "B" }));
        let next = (0..n).map(|_| self.distribution(&states)).collect();
        LabelledMarkovChain::new(&states, ls, next).unwrap()
    }
}

/// Ascends `b ↦ b ⊔ f(b)` to a pre-fixpoint, then descends to a fixpoint.
pub fn fixpoint_above(d: &Diagram<i64>, start: Valuation<i64>, alg: &MvAlgebra<i64>) -> Valuation<i64> {
    let mut b = start;
    loop {
        let fb = d.step(&b, alg).unwrap();
        let up = Valuation::new(b.domain(), b.values().iter().zip(fb.values()).map(|(x, y)| *x.max(y)).collect()).unwrap();
        if up == b {
            break;
        }
        b = up;
    }
    loop {
        let next = d.step(&b, alg).unwrap();
        if next == b {
            return b;
        }
        b = next;
    }
}
