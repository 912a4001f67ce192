"""Bond-theory kernel for closed 6R linkages."""
