//! Machine documents (JSON) and Graphviz export.

mod dot;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dot::to_dot;

use crate::fst::{Fst, FstError, FstTransition};
use crate::mealy::{Mealy, MealyError};
use crate::symbol::{InputSymbol, OutputSet, OutputSymbol, StateId};

pub const FORMAT_VERSION: u32 = 1;

/// Either kind of machine a document can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Machine {
    Fst(Fst),
    Mealy(Mealy),
}

impl Machine {
    pub fn state_count(&self) -> usize {
        match self {
            Machine::Fst(m) => m.state_count(),
            Machine::Mealy(m) => m.state_count(),
        }
    }

    pub fn into_mealy(self) -> Option<Mealy> {
        match self {
            Machine::Mealy(m) => Some(m),
            Machine::Fst(_) => None,
        }
    }
}

impl From<Fst> for Machine {
    fn from(m: Fst) -> Self {
        Machine::Fst(m)
    }
}

impl From<Mealy> for Machine {
    fn from(m: Mealy) -> Self {
        Machine::Mealy(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fst,
    Mealy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    One(u32),
    Many(Vec<u32>),
}

/// The on-disk form. Field order here is the key order in saved bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDocument {
    pub format_version: u32,
    pub kind: Kind,
    pub input_alphabet: Vec<char>,
    pub output_alphabet: Vec<String>,
    pub initial: Initial,
    pub states: usize,
    pub transitions: Vec<TransitionDocument>,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finals: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDocument {
    pub from: u32,
    /// A single character, or `"eps"` for an ε-transition (transducers only).
    pub input: String,
    pub outputs: Vec<String>,
    pub to: u32,
}

const EPS: &str = "eps";

type ParsedTransition = (StateId, Option<InputSymbol>, Vec<OutputSymbol>, StateId);

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: {}", .0.path(), .0.inner())]
    Schema(#[from] serde_path_to_error::Error<serde_json::Error>),
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Mealy(#[from] MealyError),
    #[error(transparent)]
    Fst(#[from] FstError),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

fn ids(set: impl IntoIterator<Item = StateId>) -> Vec<u32> {
    set.into_iter().map(|s| s.0).collect()
}

fn names<'a>(set: impl IntoIterator<Item = &'a OutputSymbol>) -> Vec<String> {
    set.into_iter().map(|s| s.as_str().to_owned()).collect()
}

impl MachineDocument {
    pub fn from_machine(m: &Machine) -> MachineDocument {
        match m {
            Machine::Fst(m) => Self::from_fst(m),
            Machine::Mealy(m) => Self::from_mealy(m),
        }
    }

    fn from_fst(m: &Fst) -> MachineDocument {
        let mut rows: Vec<(u32, Option<char>, u32, Vec<String>)> = m
            .transitions()
            .iter()
            .map(|t| {
                (
                    t.from.0,
                    t.input.map(|s| s.0),
                    t.to.0,
                    t.output.iter().map(|o| o.as_str().to_owned()).collect(),
                )
            })
            .collect();
        rows.sort();
        let complete = (0..m.state_count()).all(|p| {
            m.input_alphabet()
                .iter()
                .all(|&s| m.transitions_on(StateId::from(p), Some(s)).next().is_some())
        });
        MachineDocument {
            format_version: FORMAT_VERSION,
            kind: Kind::Fst,
            input_alphabet: m.input_alphabet().iter().map(|s| s.0).collect(),
            output_alphabet: names(m.output_alphabet()),
            initial: Initial::Many(ids(m.initials().iter().copied())),
            states: m.state_count(),
            transitions: rows.into_iter().map(row_document).collect(),
            complete,
            finals: Some(ids(m.finals().iter().copied())),
            provenance: None,
        }
    }

    fn from_mealy(m: &Mealy) -> MachineDocument {
        let mut rows: Vec<(u32, Option<char>, u32, Vec<String>)> = m
            .transitions()
            .map(|(from, sym, t)| (from.0, Some(sym.0), t.target.0, names(t.output.iter())))
            .collect();
        rows.sort();
        MachineDocument {
            format_version: FORMAT_VERSION,
            kind: Kind::Mealy,
            input_alphabet: m.input_alphabet().iter().map(|s| s.0).collect(),
            output_alphabet: names(m.output_alphabet()),
            initial: Initial::One(m.initial().0),
            states: m.state_count(),
            transitions: rows.into_iter().map(row_document).collect(),
            complete: m.is_complete(),
            finals: None,
            provenance: m
                .provenance()
                .map(|p| p.iter().map(|s| ids(s.iter().copied())).collect()),
        }
    }

    /// Rebuilds and revalidates the machine.
    pub fn to_machine(&self) -> Result<Machine, FormatError> {
        if self.format_version != FORMAT_VERSION {
            return Err(FormatError::Version(self.format_version));
        }
        let sigma: BTreeSet<InputSymbol> = self
            .input_alphabet
            .iter()
            .map(|&c| InputSymbol(c))
            .collect();
        if sigma.len() != self.input_alphabet.len() {
            return Err(invalid("input_alphabet", "duplicate symbol"));
        }
        let mut gamma = BTreeSet::new();
        for (i, name) in self.output_alphabet.iter().enumerate() {
            let sym = OutputSymbol::new(name.as_str()).ok_or_else(|| {
                invalid(
                    format!("output_alphabet[{i}]"),
                    format!("{name:?} is not an identifier"),
                )
            })?;
            if !gamma.insert(sym) {
                return Err(invalid(format!("output_alphabet[{i}]"), "duplicate symbol"));
            }
        }
        let machine = match self.kind {
            Kind::Fst => self.to_fst(sigma, gamma)?,
            Kind::Mealy => self.to_mealy(sigma, gamma)?,
        };
        let expected = MachineDocument::from_machine(&machine).complete;
        if self.complete != expected {
            return Err(invalid(
                "complete",
                format!("declared {}, machine is {}", self.complete, expected),
            ));
        }
        Ok(machine)
    }

    fn parsed_transitions(&self) -> Result<Vec<ParsedTransition>, FormatError> {
        let mut out = Vec::with_capacity(self.transitions.len());
        for (i, t) in self.transitions.iter().enumerate() {
            let path = format!("transitions[{i}]");
            let input = if t.input == EPS {
                None
            } else {
                let mut chars = t.input.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Some(InputSymbol(c)),
                    _ => {
                        return Err(invalid(
                            format!("{path}.input"),
                            "expected one character or \"eps\"",
                        ))
                    }
                }
            };
            let mut outputs = Vec::with_capacity(t.outputs.len());
            for (j, name) in t.outputs.iter().enumerate() {
                outputs.push(OutputSymbol::new(name.as_str()).ok_or_else(|| {
                    invalid(
                        format!("{path}.outputs[{j}]"),
                        format!("{name:?} is not an identifier"),
                    )
                })?);
            }
            out.push((StateId(t.from), input, outputs, StateId(t.to)));
        }
        Ok(out)
    }

    fn to_fst(
        &self,
        sigma: BTreeSet<InputSymbol>,
        gamma: BTreeSet<OutputSymbol>,
    ) -> Result<Machine, FormatError> {
        let initials: BTreeSet<StateId> = match &self.initial {
            Initial::One(i) => BTreeSet::from([StateId(*i)]),
            Initial::Many(v) => v.iter().map(|&i| StateId(i)).collect(),
        };
        let finals: BTreeSet<StateId> = self
            .finals
            .as_ref()
            .ok_or_else(|| invalid("finals", "required for kind \"fst\""))?
            .iter()
            .map(|&i| StateId(i))
            .collect();
        if self.provenance.is_some() {
            return Err(invalid("provenance", "only allowed for kind \"mealy\""));
        }
        let mut transitions = Vec::new();
        for (i, (from, input, outputs, to)) in self.parsed_transitions()?.into_iter().enumerate() {
            if outputs.len() > 1 {
                return Err(invalid(
                    format!("transitions[{i}].outputs"),
                    "a transducer transition emits at most one symbol",
                ));
            }
            transitions.push(FstTransition {
                from,
                input,
                output: outputs.into_iter().next(),
                to,
            });
        }
        Ok(Machine::Fst(Fst::new(
            self.states,
            sigma,
            gamma,
            transitions,
            initials,
            finals,
        )?))
    }

    fn to_mealy(
        &self,
        sigma: BTreeSet<InputSymbol>,
        gamma: BTreeSet<OutputSymbol>,
    ) -> Result<Machine, FormatError> {
        let Initial::One(initial) = self.initial else {
            return Err(invalid(
                "initial",
                "a Mealy machine has exactly one initial state",
            ));
        };
        if self.finals.is_some() {
            return Err(invalid("finals", "only allowed for kind \"fst\""));
        }
        let mut m = Mealy::new(sigma, gamma, self.states, StateId(initial))?;
        for (i, (from, input, outputs, to)) in self.parsed_transitions()?.into_iter().enumerate() {
            let input = input.ok_or_else(|| {
                invalid(
                    format!("transitions[{i}].input"),
                    "ε-transitions are not allowed in a Mealy machine",
                )
            })?;
            let set: OutputSet = outputs.into_iter().collect();
            m.set(from, input, to, set)?;
        }
        if let Some(p) = &self.provenance {
            if p.len() != self.states {
                return Err(invalid("provenance", "expected one subset per state"));
            }
            m = m.with_provenance(
                p.iter()
                    .map(|s| s.iter().map(|&i| StateId(i)).collect())
                    .collect(),
            );
        }
        Ok(Machine::Mealy(m))
    }
}

fn row_document(
    (from, input, to, outputs): (u32, Option<char>, u32, Vec<String>),
) -> TransitionDocument {
    TransitionDocument {
        from,
        input: input.map_or_else(|| EPS.to_owned(), String::from),
        outputs,
        to,
    }
}

/// Canonical bytes: pretty JSON in declaration key order, sorted transitions,
/// trailing newline.
pub fn save(m: &Machine) -> Vec<u8> {
    let doc = MachineDocument::from_machine(m);
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("documents always serialize");
    bytes.push(b'\n');
    bytes
}

pub fn load(bytes: &[u8]) -> Result<Machine, FormatError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: MachineDocument = serde_path_to_error::deserialize(de)?;
    doc.to_machine()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::{subset_t, subset_tc};
    use crate::fst::thompson;
    use crate::minimize::{is_isomorphic, min_comp, trim_sink};
    use crate::regexp::parse;

    const E3: &str = "a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>";

    fn doc(bytes: &[u8]) -> serde_json::Value {
        serde_json::from_slice(bytes).unwrap()
    }

    #[test]
    fn mealy_round_trip_is_byte_exact() {
        let m = subset_tc(&thompson(&parse(E3).unwrap())).unwrap();
        let bytes = save(&Machine::Mealy(m.clone()));
        let back = load(&bytes).unwrap();
        assert_eq!(back, Machine::Mealy(m.clone()));
        assert_eq!(save(&back), bytes);
        assert!(is_isomorphic(&back.into_mealy().unwrap(), &m));
    }

    #[test]
    fn fst_round_trip_then_determinize() {
        let fst = thompson(&parse(E3).unwrap());
        let bytes = save(&Machine::Fst(fst.clone()));
        let Machine::Fst(back) = load(&bytes).unwrap() else {
            panic!("kind changed")
        };
        assert_eq!(back, fst);
        assert_eq!(subset_t(&back).unwrap().state_count(), 10);
    }

    #[test]
    fn e3_documents() {
        let complete = min_comp(&subset_tc(&thompson(&parse(E3).unwrap())).unwrap());
        let d = doc(&save(&Machine::Mealy(complete)));
        assert_eq!(d["states"], 9);
        assert_eq!(d["complete"], true);
        assert_eq!(d["kind"], "mealy");

        let exact = min_comp(&subset_t(&thompson(&parse(E3).unwrap())).unwrap());
        let d = doc(&save(&Machine::Mealy(trim_sink(&exact).unwrap())));
        assert_eq!(d["states"], 8);
        assert_eq!(d["complete"], false);
    }

    #[test]
    fn key_order_is_fixed() {
        let m = subset_t(&thompson(&parse("a<A>").unwrap())).unwrap();
        let text = String::from_utf8(save(&Machine::Mealy(m))).unwrap();
        let keys = [
            "format_version",
            "kind",
            "input_alphabet",
            "output_alphabet",
            "initial",
            "states",
            "transitions",
            "complete",
            "provenance",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
    }

    const DUPLICATE: &str = r#"{
  "format_version": 1, "kind": "mealy", "input_alphabet": ["a"], "output_alphabet": [],
  "initial": 0, "states": 2,
  "transitions": [
    {"from": 0, "input": "a", "outputs": [], "to": 0},
    {"from": 0, "input": "a", "outputs": [], "to": 1}
  ],
  "complete": false
}"#;

    #[test]
    fn duplicate_transition_is_a_determinism_error() {
        let err = load(DUPLICATE.as_bytes()).unwrap_err();
        assert!(
            matches!(err, FormatError::Mealy(MealyError::Nondeterministic { .. })),
            "{err}"
        );
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let bad = DUPLICATE.replace("\"to\": 1", "\"to\": \"x\"");
        let err = load(bad.as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Schema(_)));
        assert!(err.to_string().starts_with("transitions[1].to"), "{err}");

        let bad = DUPLICATE.replace(
            "\"input\": \"a\", \"outputs\": [], \"to\": 1",
            "\"input\": \"ab\", \"outputs\": [], \"to\": 1",
        );
        let err = load(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("transitions[1].input"), "{err}");
    }

    #[test]
    fn complete_flag_is_checked() {
        let m = subset_tc(&thompson(&parse("a<A>").unwrap())).unwrap();
        let text = String::from_utf8(save(&Machine::Mealy(m))).unwrap();
        let lie = text.replace("\"complete\": true", "\"complete\": false");
        assert!(load(lie.as_bytes()).is_err());
    }

    #[test]
    fn version_is_checked() {
        let bad = DUPLICATE.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(load(bad.as_bytes()), Err(FormatError::Version(2))));
    }
}
