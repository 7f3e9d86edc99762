/// Splits an identifier into lowercase words at camelCase boundaries,
/// underscores, dollar signs and letter/digit transitions. Uppercase runs
/// stay together as one acronym: `parseHTTPRequest2` gives
/// `parse http request 2`.
pub fn split_subtokens(identifier: &str) -> Vec<String> {
    #[derive(PartialEq, Clone, Copy)]
    enum Class {
        Lower,
        Upper,
        Digit,
        Other,
    }
    fn class(c: char) -> Class {
        if c.is_lowercase() {
            Class::Lower
        } else if c.is_uppercase() {
            Class::Upper
        } else if c.is_numeric() {
            Class::Digit
        } else if c.is_alphabetic() {
            Class::Lower
        } else {
            Class::Other
        }
    }

    let chars: Vec<char> = identifier.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    let mut flush = |current: &mut String| {
        if !current.is_empty() {
            words.push(current.to_lowercase());
            current.clear();
        }
    };
    for (i, &c) in chars.iter().enumerate() {
        let cls = class(c);
        if cls == Class::Other {
            flush(&mut current);
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|p| chars.get(p)) {
            let prev_cls = class(prev);
            let next_lower = chars.get(i + 1).is_some_and(|&n| class(n) == Class::Lower);
            let boundary = match (prev_cls, cls) {
                (Class::Lower, Class::Upper) => true,
                // End of an acronym: `HTTPRequest` splits before `R`.
                (Class::Upper, Class::Upper) => next_lower,
                (Class::Digit, Class::Lower | Class::Upper) | (Class::Lower | Class::Upper, Class::Digit) => true,
                _ => false,
            };
            if boundary {
                flush(&mut current);
            }
        }
        current.push(c);
    }
    flush(&mut current);
    words
}

/// Subtokens of free text such as `"get bit map"` or `"setVisibility"`:
/// whitespace and punctuation separate words, each word is then split as
/// an identifier.
pub fn text_subtokens(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '$'))
        .flat_map(split_subtokens)
        .collect()
}
