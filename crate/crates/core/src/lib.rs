//! Compositional checks that a candidate is the least or greatest fixpoint
//! of a non-expansive function over an MV-chain.
//!
//! Functions are built as string diagrams of basic blocks ([`diagram`]).
//! [`engine`] decides fixpoint questions through the approximation. The
//! transport and lifting modules turn labelled Markov chains and
//! nondeterministic systems into such diagrams. Everything is generic over
//! an exact [`scalar::Scalar`]; the aliases below fix it to big rationals.

pub mod blocks;
pub mod diagram;
pub mod distribution;
pub mod dsl;
pub mod engine;
pub mod lexer;
pub mod lifting;
pub mod lp;
pub mod mv;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod set;
pub mod systems;
pub mod transport;
pub mod valuation;

pub use num_rational::BigRational as Rational;

pub type RationalAlgebra = mv::MvAlgebra<Rational>;
pub type RationalValuation = valuation::Valuation<Rational>;
pub type RationalDistribution = distribution::Distribution<Rational>;
pub type RationalBlock = blocks::Block<Rational>;
pub type RationalDiagram = diagram::Diagram<Rational>;
pub type RationalModel = dsl::Model<Rational>;
pub type RationalReport = engine::CheckReport<Rational>;
pub type RationalMarkovChain = systems::MarkovChain<Rational>;
pub type RationalLmc = systems::LabelledMarkovChain<Rational>;
