//! Minimal element walker over quick-xml that tracks local-name paths.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

/// A closed element: local-name path from the root, qualified attributes and
/// the concatenated direct text content (untrimmed).
pub(crate) struct Element<'a> {
    pub path: &'a [String],
    pub attrs: &'a [(String, String)],
    pub text: &'a str,
}

impl Element<'_> {
    pub fn is(&self, expected: &[&str]) -> bool {
        self.path.len() == expected.len() && self.path.iter().zip(expected).all(|(a, b)| a == b)
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub(crate) enum Visit<'a> {
    Open(Element<'a>),
    Close(Element<'a>),
}

struct Frame {
    attrs: Vec<(String, String)>,
    text: String,
}

fn frame_of(start: &BytesStart<'_>) -> Result<(String, Frame), String> {
    let name = String::from_utf8_lossy(start.local_name().as_ref()).into_owned();
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|e| e.to_string())?
            .into_owned();
        attrs.push((key, value));
    }
    Ok((
        name,
        Frame {
            attrs,
            text: String::new(),
        },
    ))
}

/// Walks every element of `bytes`, calling `visit` on open and close. The
/// root element's local name must equal `root`.
pub(crate) fn walk<F>(bytes: &[u8], root: &str, mut visit: F) -> Result<(), String>
where
    F: FnMut(Visit<'_>) -> Result<(), String>,
{
    let mut reader = Reader::from_reader(bytes);
    let mut buf = Vec::new();
    let mut path: Vec<String> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut seen_root = false;

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| format!("at byte {}: {e}", reader.error_position()))?;
        let mut closing = false;
        match event {
            Event::Start(ref start) | Event::Empty(ref start) => {
                let empty = matches!(event, Event::Empty(_));
                let (name, frame) = frame_of(start)?;
                if path.is_empty() {
                    if seen_root {
                        return Err("multiple root elements".to_string());
                    }
                    if name != root {
                        return Err(format!("expected <{root}> root element, found <{name}>"));
                    }
                    seen_root = true;
                }
                path.push(name);
                frames.push(frame);
                let frame = frames.last().expect("just pushed");
                visit(Visit::Open(Element {
                    path: &path,
                    attrs: &frame.attrs,
                    text: "",
                }))?;
                closing = empty;
            }
            Event::End(_) => closing = true,
            Event::Text(text) => {
                let text = text.unescape().map_err(|e| e.to_string())?;
                match frames.last_mut() {
                    Some(frame) => frame.text.push_str(&text),
                    None if !text.trim().is_empty() => {
                        return Err("text outside of the root element".to_string())
                    }
                    None => {}
                }
            }
            Event::CData(data) => {
                if let Some(frame) = frames.last_mut() {
                    frame
                        .text
                        .push_str(&String::from_utf8_lossy(&data.into_inner()));
                }
            }
            Event::Eof => break,
            _ => {}
        }
        if closing {
            let frame = frames
                .pop()
                .ok_or_else(|| "unbalanced closing tag".to_string())?;
            visit(Visit::Close(Element {
                path: &path,
                attrs: &frame.attrs,
                text: &frame.text,
            }))?;
            path.pop();
        }
        buf.clear();
    }

    if !path.is_empty() {
        return Err(format!("document ends inside <{}>", path.join("/")));
    }
    if !seen_root {
        return Err("document has no root element".to_string());
    }
    Ok(())
}
