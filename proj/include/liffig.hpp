#pragma once

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"
#include "liffig/interpreter.hpp"
#include "liffig/lexer.hpp"
#include "liffig/parser.hpp"
#include "liffig/printer.hpp"
#include "liffig/resolve.hpp"
#include "liffig/state.hpp"
#include "liffig/transpile.hpp"
#include "liffig/vc.hpp"
