//! Schematic traces: chop-chains of concrete event triples and `⌐ēv`
//! segments ("some non-empty trace without the listed events"). They are
//! the guard language of the composition rules, e.g. "τ ∉ ⌐ call(_,_)".

use super::{Event, FileOp, Item, Trace};
use crate::expr::Value;

/// An event shape: a tag with optional payload constraints (`None` is a
/// wildcard).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventShape {
    pub tag: &'static str,
    pub name: Option<String>,
    pub id: Option<u64>,
    pub file: Option<Value>,
}

impl EventShape {
    /// A shape constraining only the tag.
    pub fn tag(tag: &'static str) -> EventShape {
        EventShape { tag, name: None, id: None, file: None }
    }

    /// A shape constraining tag and scope payload.
    pub fn scoped(tag: &'static str, name: Option<&str>, id: Option<u64>) -> EventShape {
        EventShape { tag, name: name.map(str::to_string), id, file: None }
    }

    /// A file-event shape.
    pub fn file(op: FileOp, file: Option<Value>) -> EventShape {
        EventShape { tag: op.keyword(), name: None, id: None, file }
    }

    /// Whether the concrete event has this shape.
    pub fn matches(&self, ev: &Event) -> bool {
        if ev.tag() != self.tag {
            return false;
        }
        let (name, id, file) = match ev {
            Event::Call { name, id }
            | Event::Invoc { name, id }
            | Event::Push { name, id }
            | Event::Pop { name, id } => (Some(name), Some(*id), None),
            Event::Ret { id } => (None, Some(*id), None),
            Event::File { file, .. } => (None, None, Some(file)),
        };
        self.name.as_ref().is_none_or(|n| Some(n) == name)
            && self.id.is_none_or(|i| Some(i) == id)
            && self.file.as_ref().is_none_or(|f| Some(f) == file)
    }
}

/// One segment of a schematic trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    /// An event triple whose event has the given shape.
    Triple(EventShape),
    /// A non-empty trace containing no event of the listed shapes.
    NoEv(Vec<EventShape>),
}

/// Whether `t` belongs to the chop of the segments.
pub fn matches_schematic(t: &Trace, pattern: &[Segment]) -> bool {
    let items = t.items();
    let n = items.len();
    if n == 0 || pattern.is_empty() {
        return false;
    }
    // Positions at which the next segment may start (shared chop state).
    let mut starts = vec![0usize];
    for (k, seg) in pattern.iter().enumerate() {
        let last = k + 1 == pattern.len();
        let mut ends = Vec::new();
        for &p in &starts {
            match seg {
                Segment::Triple(shape) => {
                    if p + 2 < n
                        && matches!((&items[p], &items[p + 1], &items[p + 2]),
                            (Item::State(a), Item::Event(e), Item::State(b)) if a == b && shape.matches(e))
                    {
                        ends.push(p + 2);
                    }
                }
                Segment::NoEv(excl) => {
                    for (q, it) in items.iter().enumerate().skip(p) {
                        if let Item::Event(e) = it {
                            if excl.iter().any(|s| s.matches(e)) {
                                break;
                            }
                        }
                        if last || it.as_state().is_some() {
                            ends.push(q);
                        }
                    }
                }
            }
        }
        ends.sort_unstable();
        ends.dedup();
        if last {
            return ends.contains(&(n - 1));
        }
        // A chop requires the shared position to be a state.
        starts = ends.into_iter().filter(|&q| items[q].as_state().is_some()).collect();
        if starts.is_empty() {
            return false;
        }
    }
    unreachable!("loop returns on the last segment")
}
