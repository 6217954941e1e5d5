/// Canonical form of a post: lowercase, URLs and `@mentions` removed,
/// hashtag markers stripped (the body is kept), whitespace collapsed.
pub fn normalize(raw_text: &str) -> String {
    let mut out = String::with_capacity(raw_text.len());
    for token in raw_text.split_whitespace() {
        let lower = token.to_lowercase();
        let body = lower.trim_start_matches('#');
        if body.is_empty() || is_url(body) || body.starts_with('@') {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(body);
    }
    out
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

/// Removes any number of leading `RT @handle:` markers (case-insensitive).
pub fn strip_retweet_prefix(text: &str) -> &str {
    let mut rest = text.trim_start();
    loop {
        let Some(head) = rest.get(..2) else {
            return rest;
        };
        if !head.eq_ignore_ascii_case("rt") {
            return rest;
        }
        let after = rest[2..].trim_start();
        let Some(handle) = after.strip_prefix('@') else {
            return rest;
        };
        let end = handle
            .find(|c: char| c == ':' || c.is_whitespace())
            .unwrap_or(handle.len());
        if end == 0 || !handle[end..].starts_with(':') {
            return rest;
        }
        rest = handle[end + 1..].trim_start();
    }
}

/// The key under which two posts count as duplicates.
pub fn dedup_key(raw_text: &str) -> String {
    normalize(strip_retweet_prefix(raw_text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(""), "");
        assert_eq!(
            normalize("Check your PRIVILEGE https://t.co/x @usr #WhitePrivilege"),
            "check your privilege whiteprivilege"
        );
        assert_eq!(normalize("woke"), "woke");
        assert_eq!(normalize("  a\t\tb \n c  "), "a b c");
        assert_eq!(
            normalize("see www.example.org and HTTP://X.Y now"),
            "see and now"
        );
        assert_eq!(normalize("## # #@handle"), "");
    }

    #[test]
    fn retweet_prefix() {
        assert_eq!(strip_retweet_prefix("RT @a: stay woke"), "stay woke");
        assert_eq!(strip_retweet_prefix("rt @a_b:RT @c: x"), "x");
        assert_eq!(
            strip_retweet_prefix("rt is short for retweet"),
            "rt is short for retweet"
        );
        assert_eq!(
            strip_retweet_prefix("RT @nocolon words"),
            "RT @nocolon words"
        );
        assert_eq!(strip_retweet_prefix("r"), "r");
        assert_eq!(dedup_key("RT @a: Stay  Woke"), dedup_key("stay woke"));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,60}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
        }

        #[test]
        fn normalize_on_social_text(s in "([#@]?[A-Za-z]{1,6}|https?://[a-z.]{1,5}|www\\.[a-z]{1,4}|RT|[ \t\n]{1,3}){0,12}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
            for tok in once.split(' ').filter(|t| !t.is_empty()) {
                prop_assert!(!tok.starts_with('#') && !tok.starts_with('@'));
                prop_assert!(!tok.starts_with("http://") && !tok.starts_with("https://"));
            }
        }
    }
}
