namespace nsf::detail { int placeholder_io = 0; }
