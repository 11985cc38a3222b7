#pragma once

// Tiny expression grammar for operator specifications in backend files:
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := number | 'pi' | operator-string
//
// An operator string is an uppercase word over {I, X, Y, Z, P, M} with one
// letter per qubit; the leftmost letter acts on the highest-indexed qubit.
// P and M are the raising and lowering operators (for dissipators). A term
// may contain at most one operator string; a term without one contributes a
// multiple of the identity. Example: "2*pi*0.05e6 * ZX + 2*pi*1e3 * ZI".

#include <cctype>
#include <string>
#include <vector>

#include "pulseforge/linalg.hpp"

namespace pulseforge {

struct OperatorTerm {
    double coefficient = 1.0;
    std::string word;  // empty means identity
};

namespace detail {

inline bool is_operator_word(const std::string& tok) {
    if (tok.empty() || tok == "pi") return false;
    for (char c : tok)
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z' && c != 'P' && c != 'M') return false;
    return true;
}

inline std::vector<std::string> split_factors(const std::string& term) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : term) {
        if (c == '*') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline std::vector<OperatorTerm> parse_operator_expr(const std::string& expr) {
    // Split into signed terms; '+'/'-' inside exponents (e.g. 1e-7) bind to
    // the number.
    std::vector<std::pair<int, std::string>> raw_terms;
    std::string cur;
    int sign = 1, pending = 1;
    for (std::size_t i = 0; i < expr.size(); ++i) {
        const char c = expr[i];
        if ((c == '+' || c == '-') && !(i > 0 && (expr[i - 1] == 'e' || expr[i - 1] == 'E'))) {
            if (cur.find_first_not_of(" \t") == std::string::npos) {
                pending *= (c == '-') ? -1 : 1;  // unary sign
                continue;
            }
            raw_terms.emplace_back(sign * pending, cur);
            cur.clear();
            sign = (c == '-') ? -1 : 1;
            pending = 1;
        } else {
            cur += c;
        }
    }
    if (cur.find_first_not_of(" \t") != std::string::npos) raw_terms.emplace_back(sign * pending, cur);
    if (raw_terms.empty()) throw ValidationError("empty operator expression");

    std::vector<OperatorTerm> out;
    for (const auto& [s, text] : raw_terms) {
        OperatorTerm term;
        term.coefficient = static_cast<double>(s);
        for (const auto& tok : detail::split_factors(text)) {
            if (tok.empty()) throw ValidationError("empty factor in operator expression: " + expr);
            if (tok == "pi") {
                term.coefficient *= 3.14159265358979323846;
            } else if (detail::is_operator_word(tok)) {
                if (!term.word.empty())
                    throw ValidationError("more than one operator string in term: " + text);
                term.word = tok;
            } else {
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(tok, &used);
                } catch (const std::exception&) {
                    throw ValidationError("bad factor '" + tok + "' in operator expression");
                }
                if (used != tok.size()) throw ValidationError("bad factor '" + tok + "' in operator expression");
                term.coefficient *= v;
            }
        }
        out.push_back(std::move(term));
    }
    return out;
}

// 2x2 matrix for one alphabet letter.
inline Mat operator_letter(char c) {
    switch (c) {
        case 'I': case 'X': case 'Y': case 'Z': return pauli(pauli_index(c));
        case 'P': { Mat m = Mat::Zero(2, 2); m(1, 0) = 1.0; return m; }  // raising |1><0|
        case 'M': { Mat m = Mat::Zero(2, 2); m(0, 1) = 1.0; return m; }  // lowering |0><1|
        default: throw ValidationError(std::string("unknown operator letter '") + c + "'");
    }
}

inline Mat operator_word_matrix(const std::string& word, int n_qubits) {
    if (static_cast<int>(word.size()) != n_qubits)
        throw ValidationError("operator string '" + word + "' does not match qubit count " +
                              std::to_string(n_qubits));
    Mat out = Mat::Identity(1, 1);
    for (char c : word) out = kron(out, operator_letter(c));
    return out;
}

// Evaluate a full expression to a matrix on n qubits.
inline Mat operator_expr_matrix(const std::string& expr, int n_qubits) {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    Mat out = Mat::Zero(d, d);
    for (const auto& term : parse_operator_expr(expr)) {
        if (term.word.empty())
            out += term.coefficient * Mat::Identity(d, d);
        else
            out += term.coefficient * operator_word_matrix(term.word, n_qubits);
    }
    return out;
}

}  // namespace pulseforge
