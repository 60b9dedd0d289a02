pub mod analysis;
pub mod automaton;
pub mod dees;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod normalize;
pub mod reduced;
pub mod sampling;
pub mod trie;
pub mod weight;
pub mod word;
