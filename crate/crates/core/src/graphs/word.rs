use std::fmt;

/// One vertex of an edge word, optionally subscripted to tell parallel
/// edges apart (the subscript belongs to the edge ending at this vertex).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Step {
    pub vertex: String,
    pub sub: String,
}

impl Step {
    pub fn plain(v: &str) -> Self {
        Step { vertex: v.to_string(), sub: String::new() }
    }
}

/// A vertical edge written as the vertex path it traces, e.g. `c c~ f_1 f 6`.
///
/// Composite edges of a product connection are concatenations; a single
/// vertex is the trivial edge of an identity connection.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeWord(pub Vec<Step>);

impl EdgeWord {
    pub fn trivial(v: &str) -> Self {
        EdgeWord(vec![Step::plain(v)])
    }

    pub fn simple(u: &str, v: &str) -> Self {
        EdgeWord(vec![Step::plain(u), Step::plain(v)])
    }

    pub fn with_sub(u: &str, v: &str, sub: &str) -> Self {
        EdgeWord(vec![Step::plain(u), Step { vertex: v.to_string(), sub: sub.to_string() }])
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let steps: Vec<Step> = s
            .split_whitespace()
            .map(|tok| match tok.split_once('_') {
                Some((v, sub)) if !v.is_empty() && !sub.is_empty() => {
                    Step { vertex: v.to_string(), sub: sub.to_string() }
                }
                Some(_) => Step { vertex: String::new(), sub: String::new() },
                None => Step::plain(tok),
            })
            .collect();
        if steps.is_empty() || steps.iter().any(|s| s.vertex.is_empty()) {
            return Err(format!("malformed edge word '{}'", s));
        }
        if !steps[0].sub.is_empty() {
            return Err(format!("edge word '{}' starts with a subscript", s));
        }
        Ok(EdgeWord(steps))
    }

    pub fn source(&self) -> &str {
        &self.0[0].vertex
    }

    pub fn target(&self) -> &str {
        &self.0[self.0.len() - 1].vertex
    }

    /// Number of elementary edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Path concatenation; the junction vertex is written once.
    pub fn concat(&self, other: &EdgeWord) -> Option<EdgeWord> {
        if self.target() != other.source() {
            return None;
        }
        let mut steps = self.0.clone();
        steps.extend(other.0[1..].iter().cloned());
        Some(EdgeWord(steps))
    }

    /// Reversed path. Each subscript stays with its elementary edge, so it
    /// moves to that edge's new terminal vertex.
    pub fn reversed(&self) -> EdgeWord {
        let n = self.0.len();
        let steps = (0..n)
            .map(|i| {
                let src = &self.0[n - 1 - i];
                let sub = if i == 0 { String::new() } else { self.0[n - i].sub.clone() };
                Step { vertex: src.vertex.clone(), sub }
            })
            .collect();
        EdgeWord(steps)
    }

    /// Splits into elementary edges.
    pub fn edges(&self) -> Vec<EdgeWord> {
        self.0
            .windows(2)
            .map(|w| EdgeWord(vec![Step::plain(&w[0].vertex), w[1].clone()]))
            .collect()
    }
}

impl fmt::Display for EdgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|s| if s.sub.is_empty() { s.vertex.clone() } else { format!("{}_{}", s.vertex, s.sub) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let w = EdgeWord::parse("c c~ f_1 f 6").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.source(), "c");
        assert_eq!(w.target(), "6");
        assert_eq!(w.to_string(), "c c~ f_1 f 6");
        assert!(EdgeWord::parse("c_1 d").is_err());
        assert!(EdgeWord::parse("").is_err());
    }

    #[test]
    fn concat_merges_junction() {
        let a = EdgeWord::parse("b *").unwrap();
        let b = EdgeWord::parse("* *~ A~").unwrap();
        assert_eq!(a.concat(&b).unwrap().to_string(), "b * *~ A~");
        assert!(b.concat(&a).is_none());
        let t = EdgeWord::trivial("b");
        assert_eq!(t.concat(&a).unwrap(), a);
    }

    #[test]
    fn reversal_moves_subscripts() {
        let w = EdgeWord::parse("c~ f_1 f").unwrap();
        assert_eq!(w.reversed().to_string(), "f f c~_1");
        assert_eq!(w.reversed().reversed(), w);
    }
}
