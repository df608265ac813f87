//! Compiles pattern regexps (regular expressions whose input symbols may carry
//! output annotations) into minimal Mealy machines that report every match,
//! overlapping ones included, while reading each input symbol once.
//!
//! The pipeline is
//!
//! ```text
//! parse ──> thompson ──> subset_t / subset_tc ──> min_comp ──> Session
//! ```
//!
//! and every stage is checked against the automaton-free oracles in
//! [`regexp`].

pub mod behaviour;
pub mod determinize;
pub mod formats;
pub mod fst;
pub mod mealy;
pub mod minimize;
pub mod regexp;
pub mod runtime;
pub mod sample;
pub mod symbol;
pub mod verify;

pub use behaviour::BehaviourTable;
pub use determinize::{subset_t, subset_tc, DeterminizeError};
pub use formats::{load, save, to_dot, FormatError, Machine, MachineDocument};
pub use fst::{thompson, Fst, FstTransition};
pub use mealy::{machine_output, Mealy, Transition};
pub use minimize::{complete_with_sink, is_isomorphic, min_comp, trim_sink, TrimError};
pub use regexp::{parse, Expr};
pub use runtime::{run_stream, MatchEvent, Session, StepError, StreamOptions};
pub use symbol::{InputSymbol, OutputSet, OutputSymbol, StateId, UnifiedSymbol, Word};
