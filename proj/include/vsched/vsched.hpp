#pragma once

// Everything except the socket transport (transport.hpp, needs libcrypto).

#include "ast.hpp"
#include "elaborate.hpp"
#include "eval.hpp"
#include "explorer.hpp"
#include "format.hpp"
#include "frontend.hpp"
#include "kernel.hpp"
#include "lexer.hpp"
#include "logic.hpp"
#include "normalize.hpp"
#include "parser.hpp"
#include "session.hpp"
#include "source.hpp"
#include "state.hpp"
