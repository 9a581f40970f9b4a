//! Maps JSON value paths such as `factors[1].state.data[0]` to the line on
//! which the value starts, for error messages.

use std::collections::HashMap;

enum Frame {
    Object { path: String, key: Option<String> },
    Array { path: String, index: usize },
}

/// Line (1-based) of every value in `text`, keyed by path. Malformed input
/// yields a partial map; callers fall back to no line.
pub fn value_lines(text: &str) -> HashMap<String, usize> {
    let mut out = HashMap::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    let mut expecting_key = false;

    fn current_path(stack: &[Frame]) -> String {
        match stack.last() {
            None => String::new(),
            Some(Frame::Object { path, key }) => {
                let k = key.as_deref().unwrap_or("");
                if path.is_empty() {
                    k.to_string()
                } else {
                    format!("{path}.{k}")
                }
            }
            Some(Frame::Array { path, index }) => format!("{path}[{index}]"),
        }
    }

    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            '"' => {
                let mut s = String::new();
                while let Some(d) = chars.next() {
                    match d {
                        '\\' => {
                            if let Some(e) = chars.next() {
                                s.push(e);
                            }
                        }
                        '"' => break,
                        '\n' => {
                            line += 1;
                            s.push(d);
                        }
                        _ => s.push(d),
                    }
                }
                if expecting_key {
                    if let Some(Frame::Object { key, .. }) = stack.last_mut() {
                        *key = Some(s);
                    }
                    expecting_key = false;
                } else {
                    out.entry(current_path(&stack)).or_insert(line);
                }
            }
            '{' | '[' => {
                let path = current_path(&stack);
                out.entry(path.clone()).or_insert(line);
                if c == '{' {
                    stack.push(Frame::Object { path, key: None });
                    expecting_key = true;
                } else {
                    stack.push(Frame::Array { path, index: 0 });
                }
            }
            '}' | ']' => {
                stack.pop();
                expecting_key = false;
            }
            ',' => match stack.last_mut() {
                Some(Frame::Array { index, .. }) => *index += 1,
                Some(Frame::Object { .. }) => expecting_key = true,
                None => {}
            },
            ':' => {}
            c if c.is_whitespace() => {}
            _ => {
                out.entry(current_path(&stack)).or_insert(line);
                while let Some(&d) = chars.peek() {
                    if matches!(d, ',' | '}' | ']') || d.is_whitespace() {
                        break;
                    }
                    chars.next();
                }
            }
        }
    }
    out
}

/// Line of `path` or of its nearest recorded ancestor.
pub fn line_of(lines: &HashMap<String, usize>, path: &str) -> Option<usize> {
    let mut p = path.to_string();
    loop {
        if let Some(&l) = lines.get(&p) {
            return Some(l);
        }
        let cut = p.rfind(['.', '['])?;
        p.truncate(cut);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nested_values() {
        let text = "{\n  \"a\": 1,\n  \"b\": [\n    {\"c\": \"x\"},\n    {\"c\": [1,\n 2]}\n  ]\n}";
        let lines = value_lines(text);
        assert_eq!(lines["a"], 2);
        assert_eq!(lines["b"], 3);
        assert_eq!(lines["b[0].c"], 4);
        assert_eq!(lines["b[1].c"], 5);
        assert_eq!(lines["b[1].c[1]"], 6);
        assert_eq!(line_of(&lines, "b[1].c[7]"), Some(5));
        assert_eq!(line_of(&lines, "zzz"), None);
    }
}
