from zkfl.cli import main

main()
