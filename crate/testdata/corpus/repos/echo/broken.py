# Deliberate syntax error: this file must be recorded as a parse failure
# without sinking the rest of the repository.

def broken(
    return "unterminated"
