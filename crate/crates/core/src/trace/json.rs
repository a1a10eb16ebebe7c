//! JSON encoding of traces.
//!
//! A trace is an array of items, each either
//! `{"kind":"state","bindings":{...}}` or
//! `{"kind":"event","tag":"call","name":"m","id":1}` (payload fields per
//! tag: `name`/`id` for call, invoc, push, pop; `id` for ret; `file` for
//! open, close, read, write).

use super::{Event, FileOp, Item, State, Trace};
use crate::expr::Value;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

/// Errors decoding a JSON trace.
#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("item {index}: {message}")]
    Item { index: usize, message: String },
}

fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => json!(b),
        Value::Int(i) => json!(i),
        Value::Str(s) => json!(s),
    }
}

fn value_from_json(j: &Json) -> Option<Value> {
    match j {
        Json::Bool(b) => Some(Value::Bool(*b)),
        Json::Number(n) => n.as_i64().map(Value::Int),
        Json::String(s) => Some(Value::Str(s.clone())),
        _ => None,
    }
}

/// Encodes a trace.
pub fn trace_to_json(t: &Trace) -> Json {
    Json::Array(
        t.items()
            .iter()
            .map(|it| match it {
                Item::State(s) => {
                    let b: Map<String, Json> = s.bindings().map(|(k, v)| (k.clone(), value_to_json(v))).collect();
                    json!({"kind": "state", "bindings": b})
                }
                Item::Event(e) => match e {
                    Event::Call { name, id }
                    | Event::Invoc { name, id }
                    | Event::Push { name, id }
                    | Event::Pop { name, id } => json!({"kind": "event", "tag": e.tag(), "name": name, "id": id}),
                    Event::Ret { id } => json!({"kind": "event", "tag": "ret", "id": id}),
                    Event::File { file, .. } => json!({"kind": "event", "tag": e.tag(), "file": value_to_json(file)}),
                },
            })
            .collect(),
    )
}

/// Decodes a trace from JSON text.
pub fn trace_from_json(text: &str) -> Result<Trace, JsonError> {
    let j: Json = serde_json::from_str(text)?;
    let arr = j.as_array().ok_or(JsonError::Item { index: 0, message: "expected an array".into() })?;
    let mut items = Vec::with_capacity(arr.len());
    for (index, it) in arr.iter().enumerate() {
        let err = |message: &str| JsonError::Item { index, message: message.to_string() };
        let kind = it.get("kind").and_then(Json::as_str).ok_or_else(|| err("missing kind"))?;
        match kind {
            "state" => {
                let b = it.get("bindings").and_then(Json::as_object).ok_or_else(|| err("missing bindings"))?;
                let mut pairs = Vec::new();
                for (k, v) in b {
                    pairs.push((k.clone(), value_from_json(v).ok_or_else(|| err("unsupported value"))?));
                }
                items.push(Item::State(State::from_pairs(pairs)));
            }
            "event" => {
                let tag = it.get("tag").and_then(Json::as_str).ok_or_else(|| err("missing tag"))?;
                let name = || it.get("name").and_then(Json::as_str).map(str::to_string).ok_or_else(|| err("missing name"));
                let id = || it.get("id").and_then(Json::as_u64).ok_or_else(|| err("missing id"));
                let ev = match tag {
                    "call" => Event::Call { name: name()?, id: id()? },
                    "invoc" => Event::Invoc { name: name()?, id: id()? },
                    "push" => Event::Push { name: name()?, id: id()? },
                    "pop" => Event::Pop { name: name()?, id: id()? },
                    "ret" => Event::Ret { id: id()? },
                    other => {
                        let op = FileOp::from_keyword(other).ok_or_else(|| err("unknown tag"))?;
                        let file = it.get("file").and_then(value_from_json).ok_or_else(|| err("missing file"))?;
                        Event::File { op, file }
                    }
                };
                items.push(Item::Event(ev));
            }
            _ => return Err(err("unknown kind")),
        }
    }
    Ok(Trace(items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::event_triple;

    #[test]
    fn round_trip() {
        let s = State::from_pairs([("file", Value::Str("a".into())), ("x", Value::Int(3))]);
        let mut t = event_triple(&s, Event::call("m", 1));
        for e in [Event::push("m", 1), Event::file(FileOp::Write, "a"), Event::ret(1), Event::pop("m", 1)] {
            t.chop_in_place(&event_triple(&s, e)).unwrap();
        }
        let text = trace_to_json(&t).to_string();
        assert_eq!(trace_from_json(&text).unwrap(), t);
    }

    #[test]
    fn rejects_unknown_tags() {
        assert!(trace_from_json(r#"[{"kind":"event","tag":"jump","id":1}]"#).is_err());
    }
}
