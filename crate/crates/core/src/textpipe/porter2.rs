//! English Snowball ("Porter2") stemmer.
//!
//! Operates on lowercase ASCII words. Tokens containing non-ASCII characters
//! are returned unchanged.

/// Returns the Porter2 stem of `word`.
pub fn stem(word: &str) -> String {
    if !word.is_ascii() || word.len() <= 2 {
        return word.to_string();
    }
    if let Some(special) = exception1(word) {
        return special.to_string();
    }

    let mut w = Word::new(word);
    w.prelude();
    if w.len() <= 2 {
        return w.finish();
    }
    w.mark_regions();
    w.step_0();
    w.step_1a();
    if is_exception2(&w.chars) {
        return w.finish();
    }
    w.step_1b();
    w.step_1c();
    w.step_2();
    w.step_3();
    w.step_4();
    w.step_5();
    w.finish()
}

fn exception1(word: &str) -> Option<&'static str> {
    Some(match word {
        "skis" => "ski",
        "skies" => "sky",
        "dying" => "die",
        "lying" => "lie",
        "tying" => "tie",
        "idly" => "idl",
        "gently" => "gentl",
        "ugly" => "ugli",
        "early" => "earli",
        "only" => "onli",
        "singly" => "singl",
        "sky" => "sky",
        "news" => "news",
        "howe" => "howe",
        "atlas" => "atlas",
        "cosmos" => "cosmos",
        "bias" => "bias",
        "andes" => "andes",
        _ => return None,
    })
}

fn is_exception2(chars: &[u8]) -> bool {
    matches!(
        chars,
        b"inning" | b"outing" | b"canning" | b"herring" | b"earring" | b"proceed" | b"exceed" | b"succeed"
    )
}

// `Y` marks a consonant y and is not a vowel.
fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn is_double(a: u8, b: u8) -> bool {
    a == b && matches!(a, b'b' | b'd' | b'f' | b'g' | b'm' | b'n' | b'p' | b'r' | b't')
}

fn is_valid_li(c: u8) -> bool {
    matches!(c, b'c' | b'd' | b'e' | b'g' | b'h' | b'k' | b'm' | b'n' | b'r' | b't')
}

struct Word {
    chars: Vec<u8>,
    r1: usize,
    r2: usize,
}

impl Word {
    fn new(word: &str) -> Self {
        let chars = word.as_bytes().to_vec();
        let len = chars.len();
        Word { chars, r1: len, r2: len }
    }

    fn len(&self) -> usize {
        self.chars.len()
    }

    fn finish(mut self) -> String {
        for c in &mut self.chars {
            if *c == b'Y' {
                *c = b'y';
            }
        }
        String::from_utf8(self.chars).expect("ascii input stays ascii")
    }

    fn ends_with(&self, suffix: &[u8]) -> bool {
        self.chars.ends_with(suffix)
    }

    /// Start index of `suffix` if the word ends with it.
    fn suffix_start(&self, suffix: &str) -> usize {
        self.len() - suffix.len()
    }

    fn replace_suffix(&mut self, old_len: usize, new: &str) {
        let keep = self.len() - old_len;
        self.chars.truncate(keep);
        self.chars.extend_from_slice(new.as_bytes());
    }

    /// Longest suffix from `list` that the word ends with.
    fn longest<'a>(&self, list: &[&'a str]) -> Option<&'a str> {
        list.iter()
            .filter(|s| self.ends_with(s.as_bytes()))
            .max_by_key(|s| s.len())
            .copied()
    }

    fn has_vowel(&self, end: usize) -> bool {
        self.chars[..end].iter().any(|&c| is_vowel(c))
    }

    fn prelude(&mut self) {
        if self.chars.first() == Some(&b'\'') {
            self.chars.remove(0);
        }
        if self.chars.first() == Some(&b'y') {
            self.chars[0] = b'Y';
        }
        for i in 1..self.chars.len() {
            if self.chars[i] == b'y' && is_vowel(self.chars[i - 1]) {
                self.chars[i] = b'Y';
            }
        }
    }

    fn mark_regions(&mut self) {
        let len = self.len();
        let after_prefix = [&b"gener"[..], b"commun", b"arsen"]
            .iter()
            .find(|p| self.chars.starts_with(p))
            .map(|p| p.len());
        self.r1 = match after_prefix {
            Some(p) => p,
            None => region_start(&self.chars, 0),
        };
        self.r2 = if self.r1 >= len { len } else { region_start(&self.chars, self.r1) };
    }

    /// Short syllable ending at `end` (exclusive).
    fn short_syllable_at(&self, end: usize) -> bool {
        let c = &self.chars;
        if end >= 3 {
            let (a, b, d) = (c[end - 3], c[end - 2], c[end - 1]);
            if !is_vowel(a) && is_vowel(b) && !is_vowel(d) && !matches!(d, b'w' | b'x' | b'Y') {
                return true;
            }
        }
        end == 2 && is_vowel(c[0]) && !is_vowel(c[1])
    }

    fn is_short(&self) -> bool {
        self.r1 >= self.len() && self.short_syllable_at(self.len())
    }

    fn step_0(&mut self) {
        if let Some(s) = self.longest(&["'s'", "'s", "'"]) {
            self.replace_suffix(s.len(), "");
        }
    }

    fn step_1a(&mut self) {
        let Some(s) = self.longest(&["sses", "ied", "ies", "s", "us", "ss"]) else {
            return;
        };
        match s {
            "sses" => self.replace_suffix(4, "ss"),
            "ied" | "ies" => {
                let start = self.suffix_start(s);
                let rep = if start > 1 { "i" } else { "ie" };
                self.replace_suffix(3, rep);
            }
            "s" => {
                let start = self.suffix_start(s);
                // a vowel somewhere before the letter preceding the s
                if start >= 2 && self.has_vowel(start - 1) {
                    self.replace_suffix(1, "");
                }
            }
            _ => {}
        }
    }

    fn step_1b(&mut self) {
        let Some(s) = self.longest(&["eed", "eedly", "ed", "edly", "ing", "ingly"]) else {
            return;
        };
        let start = self.suffix_start(s);
        match s {
            "eed" | "eedly" => {
                if start >= self.r1 {
                    self.replace_suffix(s.len(), "ee");
                }
            }
            _ => {
                if !self.has_vowel(start) {
                    return;
                }
                self.replace_suffix(s.len(), "");
                let n = self.len();
                if self.ends_with(b"at") || self.ends_with(b"bl") || self.ends_with(b"iz") {
                    self.chars.push(b'e');
                } else if n >= 2 && is_double(self.chars[n - 2], self.chars[n - 1]) {
                    self.chars.pop();
                } else if self.is_short() {
                    self.chars.push(b'e');
                }
            }
        }
    }

    fn step_1c(&mut self) {
        let n = self.len();
        if n > 2 && matches!(self.chars[n - 1], b'y' | b'Y') && !is_vowel(self.chars[n - 2]) {
            self.chars[n - 1] = b'i';
        }
    }

    fn step_2(&mut self) {
        const SUFFIXES: &[&str] = &[
            "tional", "enci", "anci", "abli", "entli", "izer", "ization", "ational", "ation", "ator", "alism",
            "aliti", "alli", "fulness", "ousli", "ousness", "iveness", "iviti", "biliti", "bli", "ogi", "fulli",
            "lessli", "li",
        ];
        let Some(s) = self.longest(SUFFIXES) else {
            return;
        };
        let start = self.suffix_start(s);
        if start < self.r1 {
            return;
        }
        let rep = match s {
            "tional" => "tion",
            "enci" => "ence",
            "anci" => "ance",
            "abli" => "able",
            "entli" => "ent",
            "izer" | "ization" => "ize",
            "ational" | "ation" | "ator" => "ate",
            "alism" | "aliti" | "alli" => "al",
            "fulness" => "ful",
            "ousli" | "ousness" => "ous",
            "iveness" | "iviti" => "ive",
            "biliti" | "bli" => "ble",
            "ogi" => {
                if start == 0 || self.chars[start - 1] != b'l' {
                    return;
                }
                "og"
            }
            "fulli" => "ful",
            "lessli" => "less",
            "li" => {
                if start == 0 || !is_valid_li(self.chars[start - 1]) {
                    return;
                }
                ""
            }
            _ => unreachable!(),
        };
        self.replace_suffix(s.len(), rep);
    }

    fn step_3(&mut self) {
        const SUFFIXES: &[&str] = &["tional", "ational", "alize", "icate", "iciti", "ical", "ful", "ness", "ative"];
        let Some(s) = self.longest(SUFFIXES) else {
            return;
        };
        let start = self.suffix_start(s);
        if start < self.r1 {
            return;
        }
        let rep = match s {
            "tional" => "tion",
            "ational" => "ate",
            "alize" => "al",
            "icate" | "iciti" | "ical" => "ic",
            "ful" | "ness" => "",
            "ative" => {
                if start < self.r2 {
                    return;
                }
                ""
            }
            _ => unreachable!(),
        };
        self.replace_suffix(s.len(), rep);
    }

    fn step_4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ism", "ate", "iti",
            "ous", "ive", "ize", "ion",
        ];
        let Some(s) = self.longest(SUFFIXES) else {
            return;
        };
        let start = self.suffix_start(s);
        if start < self.r2 {
            return;
        }
        if s == "ion" && (start == 0 || !matches!(self.chars[start - 1], b's' | b't')) {
            return;
        }
        self.replace_suffix(s.len(), "");
    }

    fn step_5(&mut self) {
        let n = self.len();
        match self.chars.last() {
            Some(b'e') => {
                let start = n - 1;
                if start >= self.r2 || (start >= self.r1 && !self.short_syllable_at(start)) {
                    self.chars.pop();
                }
            }
            Some(b'l') => {
                let start = n - 1;
                if start >= self.r2 && start > 0 && self.chars[start - 1] == b'l' {
                    self.chars.pop();
                }
            }
            _ => {}
        }
    }
}

/// Index just past the first non-vowel that follows a vowel, searching from `from`.
fn region_start(chars: &[u8], from: usize) -> usize {
    let mut i = from;
    while i < chars.len() && !is_vowel(chars[i]) {
        i += 1;
    }
    while i < chars.len() && is_vowel(chars[i]) {
        i += 1;
    }
    if i < chars.len() {
        i + 1
    } else {
        chars.len()
    }
}
