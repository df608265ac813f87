//! Streaming a Mealy machine over input: one table lookup per symbol.

use std::fmt;
use std::io::{self, BufRead, BufReader, Read};

use thiserror::Error;

use crate::mealy::Mealy;
use crate::symbol::{InputSymbol, OutputSet, StateId};

/// Outputs emitted on reading the symbol at `position` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchEvent {
    pub position: u64,
    pub symbol: InputSymbol,
    pub outputs: OutputSet,
}

/// `position \t symbol \t out1,out2,…` with outputs sorted.
impl fmt::Display for MatchEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}",
            self.position,
            self.symbol.0,
            self.outputs.joined()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("symbol {symbol:?} at position {position} is not in the input alphabet")]
    UnknownSymbol { position: u64, symbol: char },
    #[error("no transition from state {state} on {symbol:?} at position {position}")]
    Stuck {
        position: u64,
        state: StateId,
        symbol: char,
    },
}

/// A cursor over a shared machine. Sessions are cheap and independent.
#[derive(Debug, Clone)]
pub struct Session<'m> {
    machine: &'m Mealy,
    current: StateId,
    position: u64,
    lookup_count: u64,
}

impl<'m> Session<'m> {
    pub fn start(machine: &'m Mealy) -> Session<'m> {
        Session {
            machine,
            current: machine.initial(),
            position: 0,
            lookup_count: 0,
        }
    }

    pub fn machine(&self) -> &'m Mealy {
        self.machine
    }

    pub fn current(&self) -> StateId {
        self.current
    }

    /// Symbols consumed so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Transition-table lookups performed so far; equals `position`.
    pub fn lookup_count(&self) -> u64 {
        self.lookup_count
    }

    /// Consumes one symbol. On error the session is left unchanged.
    #[inline]
    pub fn step(&mut self, symbol: InputSymbol) -> Result<Option<MatchEvent>, StepError> {
        let next = self.position + 1;
        let col = self
            .machine
            .column(symbol)
            .ok_or(StepError::UnknownSymbol {
                position: next,
                symbol: symbol.0,
            })?;
        let t = self
            .machine
            .transition_at(self.current, col)
            .ok_or(StepError::Stuck {
                position: next,
                state: self.current,
                symbol: symbol.0,
            })?;
        self.lookup_count += 1;
        self.position = next;
        self.current = t.target;
        Ok((!t.output.is_empty()).then(|| MatchEvent {
            position: next,
            symbol,
            outputs: t.output.clone(),
        }))
    }

    /// Feeds every symbol of `input`, collecting events.
    pub fn feed<I>(&mut self, input: I) -> Result<Vec<MatchEvent>, StepError>
    where
        I: IntoIterator<Item = InputSymbol>,
    {
        let mut events = Vec::new();
        for s in input {
            events.extend(self.step(s)?);
        }
        Ok(events)
    }
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("read error after {position} symbols: {source}")]
    Io { position: u64, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamOptions {
    /// Skip `\n` and `\r` bytes instead of treating them as symbols.
    pub skip_newlines: bool,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            skip_newlines: true,
        }
    }
}

/// Runs `m` over a byte stream, one byte per symbol, passing each event to
/// `on_event` as soon as it is produced. Returns the finished session's
/// position. Nothing beyond the read buffer is held in memory.
pub fn run_stream<R, F>(
    m: &Mealy,
    source: R,
    options: StreamOptions,
    mut on_event: F,
) -> Result<Session<'_>, StreamError>
where
    R: Read,
    F: FnMut(&MatchEvent),
{
    let mut session = Session::start(m);
    let mut reader = BufReader::with_capacity(64 * 1024, source);
    loop {
        let buf = match reader.fill_buf() {
            Ok(buf) => buf,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(source) => {
                return Err(StreamError::Io {
                    position: session.position(),
                    source,
                })
            }
        };
        if buf.is_empty() {
            return Ok(session);
        }
        let len = buf.len();
        for &b in buf {
            if options.skip_newlines && (b == b'\n' || b == b'\r') {
                continue;
            }
            if let Some(event) = session.step(InputSymbol(b as char))? {
                on_event(&event);
            }
        }
        reader.consume(len);
    }
}

/// Collects the events of [`run_stream`].
pub fn collect_events<R: Read>(
    m: &Mealy,
    source: R,
    options: StreamOptions,
) -> Result<Vec<MatchEvent>, StreamError> {
    let mut events = Vec::new();
    run_stream(m, source, options, |e| events.push(e.clone()))?;
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::{subset_t, subset_tc};
    use crate::fst::thompson;
    use crate::minimize::min_comp;
    use crate::regexp::{complete_oracle, parse};
    use crate::symbol::Word;

    const E3: &str = "a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>";

    fn complete_machine(text: &str) -> Mealy {
        min_comp(&subset_tc(&thompson(&parse(text).unwrap())).unwrap())
    }

    fn lines(events: &[MatchEvent]) -> String {
        events.iter().map(|e| format!("{e}\n")).collect()
    }

    #[test]
    fn trace_events() {
        let m = complete_machine(E3);
        let events =
            collect_events(&m, "abdbcabcbcdcd".as_bytes(), StreamOptions::default()).unwrap();
        assert_eq!(
            lines(&events),
            "3\td\talpha\n11\td\talpha,beta\n13\td\tbeta\n"
        );
    }

    #[test]
    fn pulse_events() {
        let m = complete_machine("lh+l<P>");
        let mut s = Session::start(&m);
        let events = s.feed(Word::from("lhlhlhl").0).unwrap();
        let at: Vec<u64> = events.iter().map(|e| e.position).collect();
        assert_eq!(at, vec![3, 5, 7]);
        assert_eq!(s.lookup_count(), 7);
        assert_eq!(s.position(), 7);
    }

    #[test]
    fn start_state() {
        let m = complete_machine(E3);
        let a = Session::start(&m);
        let mut b = Session::start(&m);
        b.step(InputSymbol('a')).unwrap();
        assert_eq!(a.position(), 0);
        assert_eq!(a.current(), m.initial());
        assert_eq!(b.position(), 1);
    }

    #[test]
    fn unknown_symbol_leaves_state() {
        let m = complete_machine(E3);
        let mut s = Session::start(&m);
        s.step(InputSymbol('a')).unwrap();
        let before = (s.current(), s.position(), s.lookup_count());
        assert_eq!(
            s.step(InputSymbol('z')),
            Err(StepError::UnknownSymbol {
                position: 2,
                symbol: 'z'
            })
        );
        assert_eq!(before, (s.current(), s.position(), s.lookup_count()));
    }

    #[test]
    fn partial_machine_gets_stuck() {
        let m = subset_t(&thompson(&parse("ab<X>").unwrap())).unwrap();
        let mut s = Session::start(&m);
        assert!(matches!(
            s.step(InputSymbol('b')),
            Err(StepError::Stuck { position: 1, .. })
        ));
        let err = collect_events(&m, "abab".as_bytes(), StreamOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            StreamError::Step(StepError::Stuck { position: 3, .. })
        ));
    }

    #[test]
    fn newline_handling() {
        let m = complete_machine("a<A>");
        let ok = collect_events(&m, "a\r\na\n".as_bytes(), StreamOptions::default()).unwrap();
        assert_eq!(
            ok.iter().map(|e| e.position).collect::<Vec<_>>(),
            vec![1, 2]
        );
        let strict = StreamOptions {
            skip_newlines: false,
        };
        assert!(collect_events(&m, "a\n".as_bytes(), strict).is_err());
        assert!(collect_events(&m, "".as_bytes(), strict)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn agrees_with_oracle_on_long_word() {
        let e = parse(E3).unwrap();
        let m = complete_machine(E3);
        let word: String = "abdbcabcbcdcdadbcbcdbbacd".repeat(8);
        let expected = complete_oracle(&e, &Word::from(word.as_str())).unwrap();
        let events = collect_events(&m, word.as_bytes(), StreamOptions::default()).unwrap();
        let got: Vec<(u64, OutputSet)> = events
            .into_iter()
            .map(|e| (e.position, e.outputs))
            .collect();
        let want: Vec<(u64, OutputSet)> = expected
            .into_iter()
            .enumerate()
            .filter(|(_, o)| !o.is_empty())
            .map(|(i, o)| (i as u64 + 1, o))
            .collect();
        assert_eq!(got, want);
    }

    struct Failing(usize);
    impl Read for Failing {
        fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
            if self.0 == 0 {
                return Err(io::Error::other("boom"));
            }
            let n = self.0.min(buf.len());
            buf[..n].fill(b'a');
            self.0 -= n;
            Ok(n)
        }
    }

    #[test]
    fn io_errors_report_position() {
        let m = complete_machine("a<A>");
        match collect_events(&m, Failing(5), StreamOptions::default()) {
            Err(StreamError::Io { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
