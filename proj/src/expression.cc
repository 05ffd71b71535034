#include "nora/expression.h"

#include "nora/text.h"

namespace nora {

bool is_comforting(std::string_view system_text, const Lexicons& lex) {
  const std::string norm = text::normalize(system_text);
  for (const auto& phrase : lex.comfort) {
    if (norm.find(phrase) != std::string::npos) return true;
  }
  return false;
}

ExpressionClass predict_expression(std::string_view system_text,
                                   const EmpathyScores& user,
                                   const Lexicons& lex) {
  const auto hits = emotion_hits(system_text, lex);
  if (auto it = hits.find(ExpressionClass::kLaughter);
      it != hits.end() && it->second > 0) {
    return ExpressionClass::kLaughter;
  }
  if (user.emotion == ExpressionClass::kSadness &&
      is_comforting(system_text, lex)) {
    return ExpressionClass::kSadness;
  }
  return score_turn(system_text, lex).emotion;
}

}  // namespace nora
