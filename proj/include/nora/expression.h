#pragma once

#include <string_view>

#include "nora/common.h"
#include "nora/empathy.h"

namespace nora {

/// Facial expression shown while the system speaks `system_text`. Rules, in
/// priority order: laughter marker in the text; sadness mirrored back when
/// the user is sad and the text is a comforting response; emotion lexicon
/// majority over the text; neutral.
ExpressionClass predict_expression(std::string_view system_text,
                                   const EmpathyScores& user,
                                   const Lexicons& lex = Lexicons::builtin());

bool is_comforting(std::string_view system_text,
                   const Lexicons& lex = Lexicons::builtin());

}  // namespace nora
