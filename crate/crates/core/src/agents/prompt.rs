//! Prompt templates with `{name}` placeholders.
//!
//! Template files live in `prompts/`. The first line is the system message
//! and the remaining lines form the user message. `{{` and `}}` produce
//! literal braces; any other brace is copied through unchanged.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::backend::{ChatMessage, ChatRequest};
use super::AgentKind;

#[derive(Debug, Error, PartialEq)]
pub enum TemplateError {
    #[error("unbound placeholder `{0}`")]
    Unbound(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub agent: AgentKind,
    pub text: &'static str,
}

impl PromptTemplate {
    pub fn for_agent(agent: AgentKind) -> Self {
        let text = match agent {
            AgentKind::Statistics => include_str!("../../prompts/statistics.txt"),
            AgentKind::Fact => include_str!("../../prompts/fact.txt"),
            AgentKind::Subjectivity => include_str!("../../prompts/subjectivity.txt"),
            AgentKind::FactReasoning => include_str!("../../prompts/fact_reasoning.txt"),
            AgentKind::SubjectivityReasoning => include_str!("../../prompts/subjectivity_reasoning.txt"),
            AgentKind::Trade => include_str!("../../prompts/trade.txt"),
            AgentKind::Reflection => include_str!("../../prompts/reflection.txt"),
        };
        Self { agent, text }
    }

    /// Placeholder names in order of first appearance.
    pub fn placeholders(&self) -> Vec<String> {
        let mut names = Vec::new();
        scan(self.text, |tok| {
            if let Token::Placeholder(name) = tok {
                if !names.iter().any(|n| n == name) {
                    names.push(name.to_string());
                }
            }
        });
        names
    }

    pub fn render(&self, ctx: &BTreeMap<&str, String>) -> Result<RenderedPrompt, TemplateError> {
        let full = render_prompt(self.text.trim_end_matches('\n'), ctx)?;
        let (system, user) = full.split_once('\n').unwrap_or((full.as_str(), ""));
        Ok(RenderedPrompt { agent: self.agent, system: system.to_string(), user: user.to_string() })
    }
}

enum Token<'a> {
    Literal(&'a str),
    Placeholder(&'a str),
}

fn scan<'a>(text: &'a str, mut emit: impl FnMut(Token<'a>)) {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut lit_start = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' | b'}' if bytes.get(i + 1) == Some(&bytes[i]) => {
                emit(Token::Literal(&text[lit_start..=i]));
                i += 2;
                lit_start = i;
            }
            b'{' => {
                let rest = &text[i + 1..];
                let name_len = rest.bytes().take_while(|b| b.is_ascii_alphanumeric() || *b == b'_').count();
                let is_name = name_len > 0 && !rest.as_bytes()[0].is_ascii_digit();
                if is_name && rest.as_bytes().get(name_len) == Some(&b'}') {
                    emit(Token::Literal(&text[lit_start..i]));
                    emit(Token::Placeholder(&rest[..name_len]));
                    i += name_len + 2;
                    lit_start = i;
                } else {
                    i += 1;
                }
            }
            _ => i += 1,
        }
    }
    emit(Token::Literal(&text[lit_start..]));
}

/// Substitutes every `{name}` in one pass; inserted values are not rescanned.
pub fn render_prompt(template: &str, ctx: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len());
    let mut missing = None;
    scan(template, |tok| match tok {
        Token::Literal(s) => out.push_str(s),
        Token::Placeholder(name) => match ctx.get(name) {
            Some(v) => out.push_str(v),
            None => {
                missing.get_or_insert_with(|| name.to_string());
            }
        },
    });
    match missing {
        Some(name) => Err(TemplateError::Unbound(name)),
        None => Ok(out),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub agent: AgentKind,
    pub system: String,
    pub user: String,
}

impl RenderedPrompt {
    /// System and user message joined by a newline; this is what transcripts record.
    pub fn text(&self) -> String {
        if self.user.is_empty() {
            self.system.clone()
        } else {
            format!("{}\n{}", self.system, self.user)
        }
    }

    pub fn digest(&self) -> String {
        prompt_digest(&self.text())
    }

    pub fn to_request(&self, temperature: f64) -> ChatRequest {
        let mut messages = vec![ChatMessage::new("system", &self.system)];
        if !self.user.is_empty() {
            messages.push(ChatMessage::new("user", &self.user));
        }
        ChatRequest { messages, temperature, agent: Some(self.agent) }
    }
}

/// Lowercase hex SHA-256.
pub fn prompt_digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(pairs: &[(&'static str, &str)]) -> BTreeMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_prompt("price {p}", &ctx(&[("p", "3")])).unwrap(), "price 3");
        assert_eq!(render_prompt("price {p} {x}", &ctx(&[("p", "3")])), Err(TemplateError::Unbound("x".into())));
        let plain = "no placeholders: {} {1} { x } here";
        assert_eq!(render_prompt(plain, &ctx(&[])).unwrap(), plain);
        assert_eq!(render_prompt("{{p}} {p}}}", &ctx(&[("p", "v")])).unwrap(), "{p} v}");
        assert_eq!(render_prompt("{a}", &ctx(&[("a", "{b}")])).unwrap(), "{b}");
    }

    #[test]
    fn every_template_renders_with_its_placeholders() {
        for agent in AgentKind::ALL {
            let t = PromptTemplate::for_agent(agent);
            let names = t.placeholders();
            assert!(names.contains(&"asset".to_string()), "{agent}: {names:?}");
            let c: BTreeMap<&str, String> = names.iter().map(|n| (n.as_str(), format!("<{n}>"))).collect();
            let r = t.render(&c).unwrap();
            assert!(r.system.starts_with("You are "), "{agent}");
            assert!(!r.user.is_empty());
            assert!(!r.text().contains('{'), "{agent}");
            let missing = t.render(&BTreeMap::new()).unwrap_err();
            assert_eq!(missing, TemplateError::Unbound(names[0].clone()));
        }
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(prompt_digest("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
