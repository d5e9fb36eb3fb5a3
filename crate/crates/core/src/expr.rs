//! Small complex-valued expression evaluator used by the state literal
//! parser and the embedded reference-value tables.
//!
//! Supported: decimal numbers, `i`, `pi`, named variables, `+ - * / ^`,
//! parentheses, implicit multiplication (`2i`, `3 sqrt(2)`), and the
//! functions `sqrt`, `sin`, `cos`, `tan`, `exp`, `ln`, `abs`, `conj`.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("trailing input at offset {0}")]
    Trailing(usize),
    #[error("expression {0:?} is not real")]
    NotReal(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = pos;
            while pos < chars.len() && (chars[pos].is_ascii_digit() || chars[pos] == '.') {
                pos += 1;
            }
            // exponent part, only when followed by a digit or sign+digit
            if pos < chars.len() && (chars[pos] == 'e' || chars[pos] == 'E') {
                let mut look = pos + 1;
                if look < chars.len() && (chars[look] == '+' || chars[look] == '-') {
                    look += 1;
                }
                if look < chars.len() && chars[look].is_ascii_digit() {
                    pos = look;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
            }
            let text: String = chars[start..pos].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| ExprError::UnexpectedChar(c, start))?;
            out.push((Token::Num(value), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = pos;
            while pos < chars.len() && (chars[pos].is_alphanumeric() || chars[pos] == '_') {
                pos += 1;
            }
            out.push((Token::Ident(chars[start..pos].iter().collect()), start));
        } else if "+-*/^".contains(c) {
            out.push((Token::Op(c), pos));
            pos += 1;
        } else if c == '(' {
            out.push((Token::LParen, pos));
            pos += 1;
        } else if c == ')' {
            out.push((Token::RParen, pos));
            pos += 1;
        } else {
            return Err(ExprError::UnexpectedChar(c, pos));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    vars: &'a HashMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Complex64, ExprError> {
        let mut acc = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Complex64, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Op('*')) => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(Token::Op('/')) => {
                    self.pos += 1;
                    acc /= self.unary()?;
                }
                Some(Token::Num(_)) | Some(Token::Ident(_)) | Some(Token::LParen) => {
                    acc *= self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64, ExprError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Complex64, ExprError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            // integer powers stay exact for real bases
            if exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() <= 64.0 {
                return Ok(base.powi(exponent.re as i32));
            }
            return Ok(base.powc(exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Complex64, ExprError> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Complex64::new(v, 0.0)),
            Some(Token::LParen) => {
                let v = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(v),
                    _ => Err(ExprError::UnexpectedEnd),
                }
            }
            Some(Token::Ident(name)) => {
                if let Some(Token::LParen) = self.peek() {
                    self.pos += 1;
                    let arg = self.expr()?;
                    match self.next() {
                        Some(Token::RParen) => {}
                        _ => return Err(ExprError::UnexpectedEnd),
                    }
                    return apply_function(&name, arg);
                }
                match name.as_str() {
                    "i" => Ok(Complex64::i()),
                    "pi" => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
                    _ => self
                        .vars
                        .get(&name)
                        .map(|v| Complex64::new(*v, 0.0))
                        .ok_or(ExprError::UnknownIdent(name)),
                }
            }
            Some(Token::Op(c)) => Err(ExprError::UnexpectedChar(c, self.tokens[self.pos - 1].1)),
            Some(Token::RParen) => Err(ExprError::UnexpectedChar(')', self.tokens[self.pos - 1].1)),
            None => Err(ExprError::UnexpectedEnd),
        }
    }
}

fn apply_function(name: &str, arg: Complex64) -> Result<Complex64, ExprError> {
    let real = arg.im == 0.0;
    Ok(match name {
        // real branches keep the libm results for real input
        "sqrt" if real && arg.re >= 0.0 => Complex64::new(arg.re.sqrt(), 0.0),
        "sqrt" => arg.sqrt(),
        "sin" if real => Complex64::new(arg.re.sin(), 0.0),
        "sin" => arg.sin(),
        "cos" if real => Complex64::new(arg.re.cos(), 0.0),
        "cos" => arg.cos(),
        "tan" => arg.tan(),
        "exp" => arg.exp(),
        "ln" => arg.ln(),
        "abs" => Complex64::new(arg.norm(), 0.0),
        "conj" => arg.conj(),
        _ => return Err(ExprError::UnknownFunction(name.to_string())),
    })
}

/// Evaluates `src` with the given variable bindings.
pub fn eval_with(src: &str, vars: &HashMap<String, f64>) -> Result<Complex64, ExprError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
    };
    let value = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(ExprError::Trailing(parser.tokens[parser.pos].1));
    }
    Ok(value)
}

pub fn eval(src: &str) -> Result<Complex64, ExprError> {
    eval_with(src, &HashMap::new())
}

/// Evaluates an expression that must be real.
pub fn eval_real_with(src: &str, vars: &HashMap<String, f64>) -> Result<f64, ExprError> {
    let v = eval_with(src, vars)?;
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(ExprError::NotReal(src.to_string()));
    }
    Ok(v.re)
}

pub fn eval_real(src: &str) -> Result<f64, ExprError> {
    eval_real_with(src, &HashMap::new())
}
