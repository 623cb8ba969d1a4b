use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of the atomic propositions `{safe, horizon}`; also a symbol of
/// the automaton alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Props(u8);

impl Props {
    pub const EMPTY: Props = Props(0);
    pub const SAFE: Props = Props(1);
    pub const HORIZON: Props = Props(2);

    pub const fn with(self, other: Props) -> Props {
        Props(self.0 | other.0)
    }

    pub const fn contains(self, other: Props) -> bool {
        self.0 & other.0 == other.0
    }

    /// All four subsets, in bit order.
    pub fn all() -> [Props; 4] {
        [Props(0), Props(1), Props(2), Props(3)]
    }
}

impl fmt::Display for Props {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.contains(Props::SAFE) {
            names.push("safe");
        }
        if self.contains(Props::HORIZON) {
            names.push("horizon");
        }
        write!(f, "{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NfaState {
    Q0,
    Q1,
}

impl fmt::Display for NfaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NfaState::Q0 => "q0",
            NfaState::Q1 => "q1",
        })
    }
}

/// Finite automaton over `2^{safe, horizon}`. Symbols match transitions
/// exactly; a symbol with no matching transition kills the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nfa {
    pub initial: NfaState,
    pub accepting: Vec<NfaState>,
    pub transitions: Vec<(NfaState, Props, NfaState)>,
}

impl Nfa {
    /// Recogniser for the finite paths satisfying `safe U (safe & horizon)`:
    /// stay in `q0` on `{safe}`, move to `q1` on `{safe, horizon}`.
    pub fn safe_until_horizon() -> Self {
        let both = Props::SAFE.with(Props::HORIZON);
        Self {
            initial: NfaState::Q0,
            accepting: vec![NfaState::Q1],
            transitions: vec![
                (NfaState::Q0, Props::SAFE, NfaState::Q0),
                (NfaState::Q0, both, NfaState::Q1),
            ],
        }
    }

    pub fn successors(&self, q: NfaState, symbol: Props) -> impl Iterator<Item = NfaState> + '_ {
        self.transitions
            .iter()
            .filter(move |(from, sym, _)| *from == q && *sym == symbol)
            .map(|(_, _, to)| *to)
    }

    pub fn is_accepting(&self, q: NfaState) -> bool {
        self.accepting.contains(&q)
    }

    /// Runs the automaton over a word; returns the reachable state set.
    pub fn run<I: IntoIterator<Item = Props>>(&self, word: I) -> Vec<NfaState> {
        let mut current = vec![self.initial];
        for symbol in word {
            let mut next: Vec<NfaState> = current
                .iter()
                .flat_map(|q| self.successors(*q, symbol))
                .collect();
            next.sort();
            next.dedup();
            current = next;
        }
        current
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_safe_prefix_then_horizon() {
        let nfa = Nfa::safe_until_horizon();
        let both = Props::SAFE.with(Props::HORIZON);
        assert_eq!(
            nfa.run([Props::SAFE, Props::SAFE, both]),
            vec![NfaState::Q1]
        );
        assert_eq!(nfa.run([Props::SAFE]), vec![NfaState::Q0]);
        assert!(nfa.run([Props::SAFE, Props::EMPTY, both]).is_empty());
        assert!(nfa.run([Props::HORIZON]).is_empty());
        // q1 has no outgoing transitions.
        assert!(nfa.run([both, Props::SAFE]).is_empty());
    }

    #[test]
    fn props_display() {
        assert_eq!(
            Props::SAFE.with(Props::HORIZON).to_string(),
            "{safe,horizon}"
        );
        assert_eq!(Props::EMPTY.to_string(), "{}");
    }
}
