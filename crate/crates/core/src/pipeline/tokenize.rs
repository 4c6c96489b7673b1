use crate::model::{is_punctuation_char, Sentence, Token};

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits raw text into sentences of unanalyzed tokens.
///
/// Words are separated by whitespace. Leading and trailing punctuation is
/// peeled off each word into its own token; a trailing run containing
/// `.`, `!` or `?` closes the sentence and becomes its terminator.
pub fn tokenize(text: &str) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();

    let mut close = |tokens: &mut Vec<Token>, terminator: Option<String>| {
        if !tokens.is_empty() {
            let mut s = Sentence::new(sentences.len(), std::mem::take(tokens));
            s.terminator = terminator;
            sentences.push(s);
        }
    };

    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| is_punctuation_char(**c)).count();
        if lead == chars.len() {
            // Punctuation-only chunk: a terminal run ends the sentence.
            if chars.iter().any(|c| is_terminal(*c)) && chars.iter().all(|c| is_terminal(*c)) {
                close(&mut current, Some(chunk.to_string()));
            } else {
                current.extend(chars.iter().map(|c| Token::new(c.to_string())));
            }
            continue;
        }
        let trail = chars
            .iter()
            .rev()
            .take_while(|c| is_punctuation_char(**c))
            .count();
        current.extend(chars[..lead].iter().map(|c| Token::new(c.to_string())));
        current.push(Token::new(
            chars[lead..chars.len() - trail].iter().collect::<String>(),
        ));
        let tail = &chars[chars.len() - trail..];
        let terminator: String = tail.iter().filter(|c| is_terminal(**c)).collect();
        current.extend(
            tail.iter()
                .filter(|c| !is_terminal(**c))
                .map(|c| Token::new(c.to_string())),
        );
        if !terminator.is_empty() {
            close(&mut current, Some(terminator));
        }
    }
    close(&mut current, None);
    sentences
}
